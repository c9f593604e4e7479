#include "cgap/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cgap::cfg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? "'" + key + "'" : "'[" + section + "] " + key + "'";
}

} // namespace

double parse_number(const std::string& text, int line) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* b = t.data();
  const char* e = b + t.size();
  // from_chars rejects a leading '+'.
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (t.empty() || r.ec != std::errc() || r.ptr != e) throw ConfigError("not a number: '" + t + "'", line);
  if (!std::isfinite(v)) throw ConfigError("number must be finite: '" + t + "'", line);
  return v;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int n = 0;
  c.data_[""];
  while (std::getline(in, raw)) {
    ++n;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", n);
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", n);
      c.data_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", n);
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", n);
    if (val.empty()) throw ConfigError("empty value for " + where(section, key), n);
    auto& sec = c.data_[section];
    if (sec.count(key)) throw ConfigError("duplicate key " + where(section, key), n);
    sec[key] = {val, n};
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  return it != data_.end() && it->second.count(key) > 0;
}

int Config::line(const std::string& section, const std::string& key) const {
  return has(section, key) ? data_.at(section).at(key).line : 0;
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing required key " + where(section, key));
  return data_.at(section).at(key);
}

std::string Config::str(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

double Config::num(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  try {
    return parse_number(e.value, e.line);
  } catch (const ConfigError&) {
    throw ConfigError(where(section, key) + " is not a number: '" + e.value + "'", e.line);
  }
}

std::vector<double> Config::list(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) throw ConfigError("empty list element in " + where(section, key), e.line);
    out.push_back(parse_number(item, e.line));
  }
  return out;
}

std::string Config::str(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? str(section, key) : fallback;
}

double Config::num(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? num(section, key) : fallback;
}

void Config::restrict_keys(const std::string& section, const std::vector<std::string>& allowed) const {
  const auto it = data_.find(section);
  if (it == data_.end()) return;
  for (const auto& [k, e] : it->second)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown key " + where(section, k), e.line);
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : data_)
    if (!k.empty() || !v.empty()) out.push_back(k);
  return out;
}

RunSpec run_spec(const Config& c) {
  static const std::vector<std::string> known = {"body", "flow", "potential", "initial", "run", "table", "sweep"};
  for (const auto& s : c.sections())
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw ConfigError("unknown section '[" + s + "]'");
  c.restrict_keys("body", {"e", "l", "lambda_star"});
  c.restrict_keys("flow", {"lambda0"});
  c.restrict_keys("potential", {"kind", "r_h", "r_theta"});
  c.restrict_keys("initial", {"h", "theta", "hdot", "thetadot"});
  c.restrict_keys("run", {"t_end", "output_dt", "rtol", "atol", "omega", "theta_max", "max_dist_change",
                          "resistance", "refresh_increment", "diagnostics", "mass", "inertia"});
  c.restrict_keys("table", {"n_dist", "n_theta", "d_min", "d_lin"});

  RunSpec r;
  auto& s = r.sim;
  const auto at = [&](const char* sec, const char* key) { return c.line(sec, key); };
  try {
    s.body = geometry::ChannelBody(c.num("body", "e", 0.5), c.num("body", "l", 3.0), c.num("body", "lambda_star", -1.0));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[body]: ") + e.what(), at("body", "e"));
  }
  s.lambda0 = c.num("flow", "lambda0", 0.0);
  if (s.lambda0 < 0.0) throw ConfigError("'[flow] lambda0' must be non-negative", at("flow", "lambda0"));

  const std::string kind = lower(c.str("potential", "kind", "hooke"));
  if (kind != "hooke") throw ConfigError("'[potential] kind' must be hooke", at("potential", "kind"));
  try {
    s.potential = dyn::PotentialSpec::hooke(c.num("potential", "r_h", 1.0), c.num("potential", "r_theta", 1.0));
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), at("potential", "r_h"));
  }

  s.initial.h = c.num("initial", "h");
  s.initial.theta = c.num("initial", "theta");
  s.initial.hdot = c.num("initial", "hdot", 0.0);
  s.initial.thetadot = c.num("initial", "thetadot", 0.0);
  if (!geometry::admissible({s.initial.h, s.initial.theta}, s.body))
    throw ConfigError("initial pose is not admissible", at("initial", "h"));

  s.t_end = c.num("run", "t_end");
  if (!(s.t_end > 0.0)) throw ConfigError("'[run] t_end' must be positive", at("run", "t_end"));
  s.output_dt = c.num("run", "output_dt", 0.5);
  if (!(s.output_dt > 0.0)) throw ConfigError("'[run] output_dt' must be positive", at("run", "output_dt"));
  s.tol.rel = c.num("run", "rtol", 1e-9);
  s.tol.abs = c.num("run", "atol", 1e-12);
  if (!(s.tol.rel > 0.0) || !(s.tol.abs > 0.0))
    throw ConfigError("tolerances must be positive", std::max(at("run", "rtol"), at("run", "atol")));
  const std::string om = lower(c.str("run", "omega", "auto"));
  s.omega = om == "auto" ? -1.0 : c.num("run", "omega");
  if (om != "auto" && s.omega < 0.0) throw ConfigError("'[run] omega' must be non-negative or auto", at("run", "omega"));
  s.theta_max = c.num("run", "theta_max", geometry::kPi);
  s.max_dist_change = c.num("run", "max_dist_change", 0.1);
  s.refresh_increment = c.num("run", "refresh_increment", 1e-3);
  if (!(s.theta_max > 0.0) || !(s.max_dist_change > 0.0) || !(s.refresh_increment > 0.0))
    throw ConfigError("theta_max, max_dist_change and refresh_increment must be positive");
  const std::string src = lower(c.str("run", "resistance", "table"));
  if (src == "table") s.source = dyn::ResistanceSource::table;
  else if (src == "exact") s.source = dyn::ResistanceSource::exact;
  else if (src == "refresh") s.source = dyn::ResistanceSource::refresh;
  else throw ConfigError("'[run] resistance' must be table, exact or refresh", at("run", "resistance"));
  const std::string diag = lower(c.str("run", "diagnostics", "true"));
  if (diag != "true" && diag != "false") throw ConfigError("'[run] diagnostics' must be true or false", at("run", "diagnostics"));
  s.diagnostics = diag == "true";
  s.inertia.m = c.num("run", "mass", 0.0);
  s.inertia.J = c.num("run", "inertia", 0.0);

  r.table.n_dist = static_cast<int>(c.num("table", "n_dist", r.table.n_dist));
  r.table.n_theta = static_cast<int>(c.num("table", "n_theta", r.table.n_theta));
  r.table.d_min = c.num("table", "d_min", r.table.d_min);
  r.table.d_lin = c.num("table", "d_lin", r.table.d_lin);
  if (r.table.n_dist < 4 || r.table.n_theta < 4) throw ConfigError("table needs at least 4 nodes per axis");
  return r;
}

SweepSpec sweep_spec(const Config& c) {
  c.restrict_keys("sweep", {"lambda0", "e0"});
  SweepSpec s;
  s.base = run_spec(c);
  s.lambda0 = c.list("sweep", "lambda0");
  s.energy = c.list("sweep", "e0");
  if (s.lambda0.empty() || s.energy.empty()) throw ConfigError("sweep grid is empty", c.line("sweep", "lambda0"));
  for (double l : s.lambda0)
    if (l < 0.0) throw ConfigError("sweep lambda0 values must be non-negative", c.line("sweep", "lambda0"));
  for (double e : s.energy)
    if (!(e > 0.0)) throw ConfigError("sweep E0 values must be positive", c.line("sweep", "e0"));
  return s;
}

dyn::State start_with_energy(const dyn::PotentialSpec& p, double h, double theta, double E0) {
  const double n = std::hypot(h, theta);
  if (!(n > 0.0)) throw DomainError("start direction must be nonzero");
  const double uh = h / n, ut = theta / n;
  // H along the ray is increasing for the admissible potentials; bracket then bisect.
  double lo = 0.0, hi = 1.0;
  while (p.value(hi * uh, hi * ut) < E0) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("potential does not reach the requested energy");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p.value(mid * uh, mid * ut) < E0 ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  dyn::State st;
  st.h = s * uh;
  st.theta = s * ut;
  return st;
}

} // namespace cgap::cfg
