#include "output.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace cgap::cli {

std::string num15(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  return std::string(buf, r.ptr);
}

nlohmann::json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  const std::string s = num15(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

void write_csv_header(std::ostream& out) { out << "t,h,theta,hdot,thetadot,dist,Etot,Ekin,Eomega,Pc,a\n"; }

void write_csv_row(std::ostream& out, const dyn::Sample& s) {
  const double v[] = {s.s.t, s.s.h, s.s.theta, s.s.hdot, s.s.thetadot, s.e.dist,
                      s.e.Etot, s.e.Ekin, s.e.Eomega, s.e.Pc, s.e.a};
  for (std::size_t i = 0; i < std::size(v); ++i) out << (i ? "," : "") << num15(v[i]);
  out << "\n";
}

namespace {
const char* source_name(dyn::ResistanceSource s) {
  switch (s) {
    case dyn::ResistanceSource::table: return "table";
    case dyn::ResistanceSource::exact: return "exact";
    case dyn::ResistanceSource::refresh: return "refresh";
  }
  return "table";
}
} // namespace

nlohmann::json config_json(const cfg::RunSpec& spec) {
  const auto& s = spec.sim;
  nlohmann::json j;
  j["body"] = {{"e", jnum(s.body.e)}, {"L", jnum(s.body.L)}, {"lambda_star", jnum(s.body.lambda_star)}};
  j["flow"] = {{"lambda0", jnum(s.lambda0)}};
  j["potential"] = {{"kind", "hooke"}, {"r_h", jnum(s.potential.r_h)}, {"r_theta", jnum(s.potential.r_theta)}};
  j["initial"] = {{"h", jnum(s.initial.h)},
                  {"theta", jnum(s.initial.theta)},
                  {"hdot", jnum(s.initial.hdot)},
                  {"thetadot", jnum(s.initial.thetadot)}};
  j["run"] = {{"t_end", jnum(s.t_end)},
              {"output_dt", jnum(s.output_dt)},
              {"rtol", jnum(s.tol.rel)},
              {"atol", jnum(s.tol.abs)},
              {"omega", s.omega < 0 ? nlohmann::json("auto") : jnum(s.omega)},
              {"theta_max", jnum(s.theta_max)},
              {"max_dist_change", jnum(s.max_dist_change)},
              {"resistance", source_name(s.source)},
              {"refresh_increment", jnum(s.refresh_increment)},
              {"diagnostics", s.diagnostics}};
  j["table"] = {{"n_dist", spec.table.n_dist},
                {"n_theta", spec.table.n_theta},
                {"d_min", jnum(spec.table.d_min)},
                {"d_lin", jnum(spec.table.d_lin)}};
  return j;
}

nlohmann::json summary_json(const cfg::RunSpec& spec, const dyn::Trajectory& tr) {
  nlohmann::json j;
  j["config"] = config_json(spec);
  j["status"] = tr.status;
  if (!tr.message.empty()) j["message"] = tr.message;
  j["samples"] = tr.samples.size();
  j["omega"] = jnum(tr.omega);
  j["dist_min"] = jnum(tr.dist_min);
  j["max_balance_ratio"] = jnum(tr.max_balance_ratio);
  j["model_evaluations"] = tr.model_evaluations;
  j["steps"] = {{"accepted", tr.stats.accepted},
                {"rejected", tr.stats.rejected},
                {"guard_rejected", tr.stats.guard_rejected},
                {"implicit", tr.stats.implicit},
                {"switches", tr.stats.switches}};
  nlohmann::json flags;
  flags["dist_positive"] = tr.dist_min > 0.0;
  flags["energy_balance"] = tr.max_balance_ratio < 10.0;
  flags["sandwich"] = dyn::sandwich_holds(tr, tr.omega);
  if (tr.samples.size() >= 5) {
    const auto d = dyn::decay_diagnostics(tr, false);
    j["beta_fit"] = jnum(d.beta_fit);
    j["E_floor"] = jnum(d.E_floor);
    j["fit_points"] = d.fit_points;
    flags["monotone"] = d.monotone;
  } else {
    j["beta_fit"] = nullptr;
    j["E_floor"] = nullptr;
  }
  if (!tr.samples.empty()) {
    const auto& e = tr.samples.back();
    j["final"] = {{"t", jnum(e.s.t)},
                  {"h", jnum(e.s.h)},
                  {"theta", jnum(e.s.theta)},
                  {"hdot", jnum(e.s.hdot)},
                  {"thetadot", jnum(e.s.thetadot)},
                  {"Etot", jnum(e.e.Etot)},
                  {"dist", jnum(e.e.dist)}};
    flags["pose_settled"] = std::abs(e.s.h) + std::abs(e.s.theta) < 1e-3;
  }
  j["flags"] = flags;
  return j;
}

nlohmann::json verify_json(const verify::Report& rep) {
  nlohmann::json j;
  j["pass"] = rep.pass();
  j["seconds"] = jnum(rep.seconds);
  j["seed"] = rep.seed;
  j["failures"] = rep.failures();
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json x = {{"module", c.module},        {"name", c.name},
                        {"property", c.property},    {"value", jnum(c.value)},
                        {"relation", c.relation},    {"tolerance", jnum(c.tolerance)},
                        {"pass", c.pass},            {"seconds", jnum(c.seconds)}};
    if (c.criterion) x["criterion"] = c.criterion;
    if (!c.note.empty()) x["note"] = c.note;
    arr.push_back(x);
  }
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

nlohmann::json write_run(const std::string& dir, const cfg::RunSpec& spec, const dyn::Trajectory& tr) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(std::filesystem::path(dir) / "trajectory.csv");
    if (!csv) throw std::runtime_error("cannot write trajectory.csv in '" + dir + "'");
    write_csv_header(csv);
    for (const auto& s : tr.samples) write_csv_row(csv, s);
  }
  auto j = summary_json(spec, tr);
  write_json((std::filesystem::path(dir) / "summary.json").string(), j);
  return j;
}

} // namespace cgap::cli
