// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            run all criteria against the cached resistance table
//   acceptance --prepare  only build (or validate) the cached table
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cgap/resistance.hpp"
#include "cgap/verify.hpp"

using namespace cgap;

namespace {

struct Criterion {
  int id;
  const char* title;
  double max_seconds;  // 0: no runtime limit
};

const Criterion kCriteria[] = {
    {1, "geometry closed forms and the kappa3 identity", 1.0},
    {2, "gap-integral exponent table", 30.0},
    {3, "c* optimality and perpendicular remainder", 30.0},
    {4, "hermite pairing constants and 1D vs 2D dissipation", 0.0},
    {5, "modulation cancellation, negative control, amplitude period", 0.0},
    {6, "M_opt limit decomposition at theta = +-pi/4", 60.0},
    {7, "ROM decay, distance, energy balance, sandwich", 300.0},
    {8, "equilibrium return for lambda0 <= 0.05, E0 <= 0.1", 0.0},
};

} // namespace

int main(int argc, char** argv) {
  const bool prepare = argc > 1 && std::strcmp(argv[1], "--prepare") == 0;
  const geometry::ChannelBody body(0.5, 3.0);
  const std::string path = res::default_cache_path(body);
  const auto table = res::ResistanceTable::cached(path, body);
  if (prepare) {
    std::cout << "resistance table ready" << (path.empty() ? " (not cached)" : " at " + path) << "\n";
    return 0;
  }

  verify::Options opt;
  opt.table = &table;
  const auto rep = verify::run(opt);

  std::map<int, std::vector<const verify::Check*>> by;
  for (const auto& c : rep.checks)
    if (c.criterion > 0) by[c.criterion].push_back(&c);

  bool all = true;
  for (const auto& k : kCriteria) {
    const auto& cs = by[k.id];
    double secs = 0.0;
    std::vector<std::string> failed;
    for (const auto* c : cs) {
      secs += c->seconds;
      if (!c->pass) failed.push_back(c->name);
    }
    std::string why;
    if (cs.empty()) why = "no checks";
    for (const auto& f : failed) why += (why.empty() ? "" : ", ") + f;
    if (k.max_seconds > 0 && secs >= k.max_seconds) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "runtime %.1f s over %.0f s", secs, k.max_seconds);
      why += (why.empty() ? "" : ", ") + std::string(buf);
    }
    const bool ok = why.empty();
    all = all && ok;
    std::printf("%s criterion %d: %s (%zu checks, %.2f s%s)%s%s\n", ok ? "PASS" : "FAIL", k.id, k.title, cs.size(),
                secs, k.max_seconds > 0 ? "" : ", no limit", ok ? "" : " -- ", why.c_str());
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
