#pragma once

#include <map>
#include <string>
#include <vector>

#include "cgap/contactdyn.hpp"
#include "cgap/errors.hpp"
#include "cgap/resistance.hpp"

namespace cgap::cfg {

// Flat key = value text with [section] headers. '#' and ';' start comments.
// Keys outside any section live in section "".
class Config {
public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  // Line of the entry, 0 when absent.
  int line(const std::string& section, const std::string& key) const;

  // Required lookups throw ConfigError naming the key when it is absent.
  std::string str(const std::string& section, const std::string& key) const;
  double num(const std::string& section, const std::string& key) const;
  std::vector<double> list(const std::string& section, const std::string& key) const;

  std::string str(const std::string& section, const std::string& key, const std::string& fallback) const;
  double num(const std::string& section, const std::string& key, double fallback) const;

  // Rejects keys of `section` outside `allowed`.
  void restrict_keys(const std::string& section, const std::vector<std::string>& allowed) const;
  std::vector<std::string> sections() const;
  const std::string& origin() const { return origin_; }

private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> data_;
  std::string origin_;
  const Entry& entry(const std::string& section, const std::string& key) const;
};

// Locale-independent number parsing; throws ConfigError on trailing junk.
double parse_number(const std::string& text, int line = 0);

struct RunSpec {
  dyn::SimConfig sim;
  res::TableOptions table;
};

// Sections [body], [flow], [potential], [initial], [run], [table]. Required:
// [initial] h and theta, [run] t_end.
RunSpec run_spec(const Config& c);

struct SweepSpec {
  RunSpec base;
  std::vector<double> lambda0;
  std::vector<double> energy;  // initial E_tot; the start is at rest along the [initial] direction
};
// [sweep] lambda0 = list, E0 = list (both required and non-empty).
SweepSpec sweep_spec(const Config& c);

// Pose on the ray through (h, theta) from the origin with H = E0, at rest.
dyn::State start_with_energy(const dyn::PotentialSpec& p, double h, double theta, double E0);

} // namespace cgap::cfg
