#include <benchmark/benchmark.h>

#include "cgap/asymptotics.hpp"
#include "cgap/contactdyn.hpp"
#include "cgap/lubrication.hpp"
#include "cgap/resistance.hpp"

using namespace cgap;

namespace {
const geometry::ChannelBody body(0.5, 3.0);

// Production table when cached, otherwise a coarse one so the run stays short.
const res::ResistanceTable& table() {
  static const res::ResistanceTable t = [] {
    res::ResistanceTable out;
    if (res::ResistanceTable::load(res::default_cache_path(body), body, {}, out)) return out;
    res::TableOptions o;
    o.n_dist = 10;
    o.n_theta = 8;
    return res::ResistanceTable::build(body, o);
  }();
  return t;
}
} // namespace

static void BM_ContactPoint(benchmark::State& st) {
  double th = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(geometry::contact_point(th, body));
    th += 1e-3;
  }
}
BENCHMARK(BM_ContactPoint);

static void BM_CurvatureCoeffs(benchmark::State& st) {
  double th = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(geometry::curvature_coeffs(th, body));
    th += 1e-3;
  }
}
BENCHMARK(BM_CurvatureCoeffs);

static void BM_CStarPerp(benchmark::State& st) {
  const double d = std::pow(10.0, -static_cast<double>(st.range(0)));
  const auto ctx = lub::gap_context(0.6, d, body);
  for (auto _ : st) benchmark::DoNotOptimize(lub::c_star(lub::Kind::perp, ctx));
}
BENCHMARK(BM_CStarPerp)->Arg(2)->Arg(4)->Arg(6);

static void BM_GapDissipation(benchmark::State& st) {
  const double d = std::pow(10.0, -static_cast<double>(st.range(0)));
  const auto ctx = lub::gap_context(0.6, d, body);
  for (auto _ : st) benchmark::DoNotOptimize(lub::gap_dissipation(ctx));
}
BENCHMARK(BM_GapDissipation)->Arg(2)->Arg(4)->Arg(6);

static void BM_GapIntegral(benchmark::State& st) {
  const auto ctx = lub::gap_context(0.6, 1e-5, body);
  for (auto _ : st) benchmark::DoNotOptimize(asym::gap_integral(4, 3, ctx));
}
BENCHMARK(BM_GapIntegral);

static void BM_KappaProfile(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(asym::kappa_profile(0.6, body));
}
BENCHMARK(BM_KappaProfile);

static void BM_ExactResistance(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(res::resistance_and_forcing({0.7, 0.4}, body, 0.1));
}
BENCHMARK(BM_ExactResistance)->Unit(benchmark::kMillisecond);

static void BM_TableModel(benchmark::State& st) {
  const auto& t = table();
  double h = 0.3;
  for (auto _ : st) {
    benchmark::DoNotOptimize(t.model({h, 0.4}, 0.1));
    h = h > 1.5 ? 0.3 : h + 1e-3;
  }
}
BENCHMARK(BM_TableModel);

static void BM_SimulateTable(benchmark::State& st) {
  const auto& t = table();
  dyn::SimConfig c;
  c.body = body;
  c.initial.h = 0.3;
  c.initial.theta = 0.2;
  c.t_end = 20.0;
  c.diagnostics = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(dyn::simulate(c, &t));
}
BENCHMARK(BM_SimulateTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ModAtDistance(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dyn::mod_at_distance(0.7, 0.5, 1e-4, body));
}
BENCHMARK(BM_ModAtDistance)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
