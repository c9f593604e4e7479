#include "doctest.h"

#include <cmath>

#include "cgap/lubrication.hpp"

using namespace cgap;
using namespace cgap::lub;
using doctest::Approx;

namespace {
const geometry::ChannelBody body(0.5, 3.0);
constexpr double kPi = geometry::kPi;

// Composite Simpson in u with tau = sqrt(d) sinh(u); independent of the
// quadrature module.
template <class F>
double sinh_simpson(F f, double d, double lam, int n = 4000) {
  const double s = std::sqrt(d);
  const double umax = std::asinh(lam / s);
  const double h = 2 * umax / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = -umax + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f(s * std::sinh(u)) * s * std::cosh(u);
  }
  return acc * h / 3.0;
}
} // namespace

TEST_CASE("hermite polynomials and their pairings") {
  using H = HermitePolys;
  CHECK(H::P1(0.0) == 0.0);
  CHECK(H::P1(1.0) == 1.0);
  CHECK(H::dP1(0.0) == 0.0);
  CHECK(H::dP1(1.0) == 0.0);
  CHECK(H::P2(1.0) == 0.0);
  CHECK(H::dP2(1.0) == 1.0);
  const auto p = hermite_pairings();
  CHECK(p.p1p1 == Approx(12.0).epsilon(1e-14));
  CHECK(p.p1p2 == Approx(-6.0).epsilon(1e-14));
  CHECK(p.p2p2 == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("c_star vanishes on the symmetric pose") {
  const auto ctx = gap_context(0.0, 1e-4, body);
  CHECK(std::abs(c_star(Kind::perp, ctx)) < 1e-14);
}

TEST_CASE("c_star satisfies the mean-free wall condition") {
  for (double th : {0.3, 0.9, -0.5})
    for (double d : {1e-2, 1e-5}) {
      const auto ctx = gap_context(th, d, body);
      for (Kind k : {Kind::perp, Kind::parallel, Kind::rotation}) {
        INFO(to_string(k) << " theta=" << th << " d=" << d);
        CHECK(optimality_residual(k, ctx, c_star(k, ctx)) < 1e-9);
      }
      // Perpendicular constant is the ratio of the first two inverse-cube moments.
      const double n = sinh_simpson([&](double t) { return t / std::pow(ctx.g(t), 3); }, d, ctx.lam);
      const double m = sinh_simpson([&](double t) { return 1.0 / std::pow(ctx.g(t), 3); }, d, ctx.lam);
      CHECK(c_star(Kind::perp, ctx) == Approx(n / m).epsilon(1e-7));
    }
}

TEST_CASE("gap dissipation matches 12 int (tau - c)^2 / g^3") {
  for (double th : {0.0, 0.7})
    for (double d : {1e-3, 1e-6}) {
      const auto ctx = gap_context(th, d, body);
      const double c = c_star(Kind::perp, ctx);
      const double ref = sinh_simpson([&](double t) { return 12 * (t - c) * (t - c) / std::pow(ctx.g(t), 3); }, d,
                                      ctx.lam);
      CHECK(gap_dissipation(ctx) == Approx(ref).epsilon(1e-7));
    }
}

TEST_CASE("gap dissipation leading constant") {
  // 12 int tau^2/(d + kappa2 tau^2)^3 = (3 pi / 2) kappa2^(-3/2) d^(-3/2).
  for (double th : {0.0, 0.7}) {
    const double k2 = geometry::curvature_coeffs(th, body).kappa2;
    const double lead = 1.5 * kPi * std::pow(k2, -1.5);
    const double d = 1e-8;
    const double v = gap_dissipation(gap_context(th, d, body)) * std::pow(d, 1.5);
    CHECK(v == Approx(lead).epsilon(1e-3));
  }
}

TEST_CASE("1D and 2D shear pairings agree") {
  const auto ctx = gap_context(0.4, 1e-3, body);
  const auto c = c_star_all(ctx);
  const Motion perp = Motion::of(Kind::perp), rot = Motion::of(Kind::rotation), par = Motion::of(Kind::parallel);
  for (const auto& [a, b] : {std::pair{perp, perp}, std::pair{perp, rot}, std::pair{par, rot}, std::pair{rot, rot}}) {
    const double p1 = pairing_1d(a, b, ctx, c), p2 = pairing_2d(a, b, ctx, c);
    CHECK(p1 == Approx(p2).epsilon(1e-8));
  }
  CHECK(pairing_1d(perp, perp, ctx, c) == Approx(gap_dissipation(ctx)).epsilon(1e-10));
}

TEST_CASE("pairing is bilinear in the motion") {
  const auto ctx = gap_context(0.2, 1e-3, body);
  const auto c = c_star_all(ctx);
  const Motion a{1.0, 0.3, -0.7}, b{0.2, -1.1, 0.5};
  const Motion ab{a.perp + 2 * b.perp, a.parallel + 2 * b.parallel, a.rotation + 2 * b.rotation};
  const double lhs = pairing_1d(ab, a, ctx, c);
  const double rhs = pairing_1d(a, a, ctx, c) + 2 * pairing_1d(b, a, ctx, c);
  CHECK(lhs == Approx(rhs).epsilon(1e-10));
  CHECK(pairing_1d(a, b, ctx, c) == Approx(pairing_1d(b, a, ctx, c)).epsilon(1e-12));
}

TEST_CASE("psi_opt matches the boundary data") {
  const auto ctx = gap_context(0.5, 1e-3, body);
  const double c = c_star(Kind::perp, ctx);
  const Motion m = Motion::of(Kind::perp);
  for (double tau : {-0.05, 0.0, 0.02}) {
    CHECK(psi_opt(m, ctx, c, tau, 0.0) == 0.0);
    double A, B;
    boundary_trace(m, ctx.shape, tau, A, B);
    CHECK(psi_opt(m, ctx, c, tau, ctx.g(tau)) == Approx(A - c).epsilon(1e-13));
  }
}
