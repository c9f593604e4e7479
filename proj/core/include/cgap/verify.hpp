#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cgap/resistance.hpp"

namespace cgap::verify {

struct Check {
  std::string module;
  std::string name;
  std::string property;  // one-line statement of what is checked
  double value = 0.0;    // measured
  double tolerance = 0.0;
  std::string relation;  // value <relation> tolerance must hold: "<", "<=", ">", ">="
  bool pass = false;
  double seconds = 0.0;
  std::string note;
  int criterion = 0;  // acceptance criterion the check belongs to, 0 for none
};

struct Options {
  std::string only;  // module name; empty runs all
  double tol_scale = 1.0;  // multiplies accuracy tolerances (not exponent or sign thresholds)
  std::uint64_t seed = 20240917;
  int jobs = 1;
  // Negative-control hook: negate kappa3 in the curvature identity check.
  bool flip_kappa3_sign = false;
  // Resistance table for the ROM checks. When null, the table is loaded from
  // table_cache (or built there, or in memory when the path is empty).
  const res::ResistanceTable* table = nullptr;
  std::string table_cache;
  std::function<void(const Check&)> on_check;
};

struct Report {
  std::vector<Check> checks;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  bool pass() const;
  std::vector<std::string> failures() const;
};

const std::vector<std::string>& modules();

// Throws DomainError on an unknown module filter.
Report run(const Options& opt = {});

} // namespace cgap::verify
