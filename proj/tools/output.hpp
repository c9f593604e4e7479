#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "cgap/config.hpp"
#include "cgap/contactdyn.hpp"
#include "cgap/verify.hpp"

namespace cgap::cli {

// 15 significant digits, '.' separator, independent of the global locale.
std::string num15(double v);
// v rounded to 15 significant digits; NaN and infinities become null.
nlohmann::json jnum(double v);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const dyn::Sample& s);

nlohmann::json config_json(const cfg::RunSpec& spec);
nlohmann::json summary_json(const cfg::RunSpec& spec, const dyn::Trajectory& tr);
nlohmann::json verify_json(const verify::Report& rep);

// Writes trajectory.csv and summary.json into dir; returns the summary.
nlohmann::json write_run(const std::string& dir, const cfg::RunSpec& spec, const dyn::Trajectory& tr);
void write_json(const std::string& path, const nlohmann::json& j);

} // namespace cgap::cli
