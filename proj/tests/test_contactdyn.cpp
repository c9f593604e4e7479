#include "doctest.h"

#include <cmath>

#include "cgap/contactdyn.hpp"

using namespace cgap;
using namespace cgap::dyn;
using doctest::Approx;

namespace {
const ChannelBody body(0.5, 3.0);
constexpr double kPi = geometry::kPi;

const res::ResistanceTable& table() {
  static const res::ResistanceTable t = [] {
    res::TableOptions o;
    o.n_dist = 10;
    o.n_theta = 8;
    return res::ResistanceTable::build(body, o);
  }();
  return t;
}

SimConfig base(double h, double theta, double t_end) {
  SimConfig c;
  c.body = body;
  c.initial.h = h;
  c.initial.theta = theta;
  c.t_end = t_end;
  return c;
}
} // namespace

TEST_CASE("inertia of the unit-density ellipse") {
  const auto in = Inertia::of(body);
  CHECK(in.m == Approx(kPi * 0.5).epsilon(1e-15));
  CHECK(in.J == Approx(kPi * 0.5 * 1.25 / 4).epsilon(1e-15));
}

TEST_CASE("hooke potential") {
  const auto p = PotentialSpec::hooke(2.0, 0.5);
  CHECK(p.is_hooke());
  CHECK(p.value(0.3, -0.4) == Approx(0.5 * (2.0 * 0.09 + 0.5 * 0.16)));
  const auto g = p.gradient(0.3, -0.4);
  CHECK(g[0] == Approx(0.6));
  CHECK(g[1] == Approx(-0.2));
  const auto c = check_potential(p, body);
  CHECK(c.ok());
  CHECK(c.coercivity == Approx(0.5).epsilon(1e-12));
  CHECK(c.structural == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("user potential is checked") {
  // Quartic in h: coercivity degrades toward the origin.
  const auto p = PotentialSpec::user([](double h, double t) { return h * h * h * h + t * t; },
                                     [](double h, double t) { return std::array<double, 2>{4 * h * h * h, 2 * t}; });
  CHECK_FALSE(p.is_hooke());
  const auto c = check_potential(p, body);
  CHECK(c.coercivity < 0.1);
  CHECK(c.zero_at_origin);
}

TEST_CASE("amplitude closed form") {
  const Amplitude a(body);
  CHECK(a.closed_form(0.7, 0.7) == 1.0);
  // a depends on theta only through kappa2, which is pi periodic and even.
  CHECK(a.closed_form(0.7 + kPi, 0.7) == Approx(1.0).epsilon(1e-12));
  CHECK(a.closed_form(-0.7, 0.7) == Approx(1.0).epsilon(1e-12));
  CHECK(a.closed_form(0.2, 1.1) * a.closed_form(1.1, 0.2) == Approx(1.0).epsilon(1e-12));
  const double k0 = 0.4, k1 = 0.41;
  CHECK(a.G_increment(k0, k1) == Approx(a.G(k1) - a.G(k0)).epsilon(1e-9));
}

TEST_CASE("amplitude ODE follows the closed form") {
  const auto path = amplitude([](double t) { return 0.3 + 0.8 * std::sin(t); },
                              [](double t) { return 0.8 * std::cos(t); }, 0.0, 6.0, 25, body);
  CHECK(path.max_rel_diff < 1e-8);
  CHECK(path.a_min > 0.0);
  CHECK(path.ode.front() == 1.0);
}

TEST_CASE("mod coefficient cancels and the frozen control does not") {
  for (double th : {0.3, 1.0, 2.2}) {
    CHECK(mod_coefficient(th, 0.7, body).relative < 1e-12);
    CHECK(mod_coefficient(th, 0.7, body, true).relative > 1e-2);
  }
}

TEST_CASE("contact potential at rest") {
  State s;
  s.h = 2.1;
  s.theta = -0.6;
  const auto p = contact_potential(s, body, 1.3, Inertia::of(body));
  CHECK(p.Pc0 > 0.0);
  CHECK(p.momentum == 0.0);
  CHECK(p.Pc == Approx(1.3 * p.Pc0).epsilon(1e-14));
}

TEST_CASE("short table run keeps the energy balance and the distance") {
  auto cfg = base(0.6, 0.4, 10.0);
  cfg.initial.hdot = 0.2;
  const auto tr = simulate(cfg, &table());
  REQUIRE(tr.ok());
  CHECK(tr.samples.size() == 21);
  CHECK(tr.samples.front().s.t == 0.0);
  CHECK(tr.samples.back().s.t == Approx(10.0).epsilon(1e-14));
  CHECK(tr.max_balance_ratio < 10.0);
  CHECK(tr.dist_min > 0.0);
  for (std::size_t i = 1; i < tr.samples.size(); ++i)
    CHECK(tr.samples[i].e.Etot <= tr.samples[i - 1].e.Etot * (1 + 1e-9) + 1e-15);
  CHECK(sandwich_holds(tr, tr.omega));
  CHECK(tr.omega == Approx(omega0(tr)).epsilon(1e-9));
}

TEST_CASE("sample callback sees every sample") {
  auto cfg = base(0.2, 0.1, 3.0);
  cfg.diagnostics = false;
  int n = 0;
  const auto tr = simulate(cfg, &table(), [&](const Sample&) { ++n; });
  CHECK(n == static_cast<int>(tr.samples.size()));
}

TEST_CASE("apply_omega") {
  auto tr = simulate(base(0.5, -0.3, 4.0), &table());
  apply_omega(tr, 0.0);
  for (const auto& s : tr.samples) CHECK(s.e.Eomega == s.e.Etot);
  apply_omega(tr, 0.2);
  const auto& s = tr.samples[3];
  CHECK(s.e.Eomega == Approx(s.e.Etot + 0.2 * s.e.cross).epsilon(1e-14));
}

TEST_CASE("rest is an equilibrium") {
  const auto tr = simulate(base(0.0, 0.0, 5.0), &table());
  REQUIRE(tr.ok());
  CHECK(std::abs(tr.samples.back().s.h) < 1e-14);
  CHECK(tr.samples.back().e.Etot == 0.0);
}

TEST_CASE("failure statuses") {
  auto cfg = base(0.2, 1.0, 20.0);
  cfg.initial.thetadot = 20.0;
  cfg.theta_max = 1.01;
  const auto tr = simulate(cfg, &table());
  CHECK(tr.status == "theta_guard");
  CHECK_FALSE(tr.samples.empty());
  CHECK_THROWS_AS(simulate(base(0.2, 0.1, 1.0), nullptr), DomainError);
  CHECK_THROWS_AS(simulate(base(2.6, 0.0, 1.0), &table()), AdmissibilityError);
}

TEST_CASE("decay diagnostics need a fit") {
  const auto tr = simulate(base(0.0, 0.0, 2.0), &table());
  CHECK_THROWS_AS(decay_diagnostics(tr), DomainError);
  CHECK(std::isnan(decay_diagnostics(tr, false).beta_fit));
}
