#include "doctest.h"

#include <cmath>

#include "cgap/geometry.hpp"

using namespace cgap;
using namespace cgap::geometry;
using doctest::Approx;

namespace {
// High-precision values at e = 0.5, theta = pi/4, from an independent
// arbitrary-precision evaluation with numerical differentiation.
constexpr double kX1 = -0.474341649025256899800;
constexpr double kX2 = -0.790569415042094832999;
constexpr double kK2 = 0.988211768802618541250;
constexpr double kK3 = -1.171875;
constexpr double kK4 = 2.354723355349989492821;
constexpr double kDK2 = 1.778781183844713374249;

const ChannelBody body(0.5, 3.0);
} // namespace

TEST_CASE("contact point closed forms") {
  auto p0 = contact_point(0.0, body);
  CHECK(p0.x1 == 0.0);
  CHECK(p0.x2 == Approx(-0.5).epsilon(1e-15));
  auto p1 = contact_point(0.5 * kPi, body);
  CHECK(p1.x1 == 0.0);
  CHECK(p1.x2 == Approx(-1.0).epsilon(1e-15));
  auto p = contact_point(0.25 * kPi, body);
  CHECK(std::abs(p.x1 - kX1) < 1e-14);
  CHECK(std::abs(p.x2 - kX2) < 1e-14);
  // On the boundary and with a vertical tangent.
  CHECK(std::abs(level(0.25 * kPi, p.x1, p.x2, 0.5)) < 1e-12);
  const QuadCoeffs q = quad_coeffs(0.25 * kPi, 0.5);
  CHECK(std::abs(2 * q.A * p.x1 + q.B * p.x2) < 1e-12);
}

TEST_CASE("contact point is pi periodic") {
  for (double t : {-1.3, -0.2, 0.4, 1.1}) {
    auto a = contact_point(t, body), b = contact_point(t + kPi, body), c = contact_point(t - 2 * kPi, body);
    CHECK(std::abs(a.x1 - b.x1) < 1e-13);
    CHECK(std::abs(a.x2 - c.x2) < 1e-13);
  }
}

TEST_CASE("gap profile") {
  const ChannelBody wide(0.5, 3.0, 0.5);
  CHECK(gap_profile(0.0, 0.6, wide) == Approx(-0.4).epsilon(1e-14));
  for (double t : {0.0, 0.3, -0.9, 1.4}) {
    CHECK(std::abs(gap_profile(t, 0.0, body) - contact_point(t, body).x2) < 1e-15);
    const double h = 1e-6;
    CHECK(std::abs(gap_profile(t, h, body) - gap_profile(t, -h, body)) / (2 * h) < 1e-10);
  }
  CHECK_THROWS_AS(gap_profile(0.0, 3.0 * body.lambda_star, body), DomainError);
  // Stable rise agrees with the direct graph.
  for (double tau : {-0.1, -0.01, 0.05, 0.1}) {
    const double direct = graph_lower(0.7, contact_point(0.7, body).x1 + tau, 0.5) - contact_point(0.7, body).x2;
    CHECK(gap_rise(0.7, tau, body) == Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("gap profile derivatives") {
  for (double tau : {-0.2, 0.0, 0.15}) {
    auto d = gap_profile_derivs(1.0, tau, body);
    const double h = 1e-5;
    CHECK(d.g1 == Approx((gap_profile(1.0, tau + h, body) - gap_profile(1.0, tau - h, body)) / (2 * h)).epsilon(1e-8));
    CHECK(d.g2 == Approx((gap_profile_derivs(1.0, tau + h, body).g1 - gap_profile_derivs(1.0, tau - h, body).g1) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("curvature coefficients") {
  auto c0 = curvature_coeffs(0.0, body);
  CHECK(c0.kappa2 == Approx(0.25).epsilon(1e-15));
  CHECK(c0.kappa3 == 0.0);
  auto c1 = curvature_coeffs(0.5 * kPi, body);
  CHECK(c1.kappa2 == Approx(2.0).epsilon(1e-15));
  CHECK(c1.kappa3 == 0.0);
  auto c = curvature_coeffs(0.25 * kPi, body);
  CHECK(c.kappa2 == Approx(kK2).epsilon(1e-14));
  CHECK(c.kappa3 == Approx(kK3).epsilon(1e-14));
  CHECK(dtheta_kappa2(0.25 * kPi, body) == Approx(kDK2).epsilon(1e-13));
  // kappa2 = |x2|^3 / (2 e^2) on the whole circle.
  for (int i = 0; i < 16; ++i) {
    const double t = -1.5 + 0.2 * i;
    CHECK(curvature_coeffs(t, body).kappa2 == Approx(std::pow(-contact_point(t, body).x2, 3) / 0.5).epsilon(1e-13));
  }
}

TEST_CASE("taylor fit matches closed forms") {
  auto f = taylor_fit(0.25 * kPi, body);
  CHECK(f.kappa2 == Approx(kK2).epsilon(1e-9));
  CHECK(f.kappa3 == Approx(kK3).epsilon(1e-8));
  CHECK(f.kappa4 == Approx(kK4).epsilon(1e-5));
  CHECK(taylor_fit(0.0, body).kappa2 == Approx(0.25).epsilon(1e-10));
}

TEST_CASE("dtheta contact") {
  CHECK(dtheta_contact(0.0, body).x2 == 0.0);
  auto d = dtheta_contact(0.25 * kPi, body);
  CHECK(d.x2 == Approx(kX1).epsilon(1e-13));
  const double h = 1e-5;
  CHECK(d.x1 == Approx((contact_point(0.25 * kPi + h, body).x1 - contact_point(0.25 * kPi - h, body).x1) / (2 * h)).epsilon(1e-8));
  for (double t : {-1.2, -0.4, 0.3, 1.3}) CHECK(dtheta_contact(t, body).x2 == Approx(contact_point(t, body).x1).epsilon(1e-12));
}

TEST_CASE("K2 maps") {
  const K2Maps m(body);
  CHECK(m.K2(-0.5) == Approx(0.25).epsilon(1e-14));
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = -1.0 + 0.5 * i / 99.0;
    worst = std::max(worst, std::abs(m.X2(m.K2(x)) - x));
  }
  CHECK(worst < 1e-10);
  // Closed form X2(k) = -(2 e^2 k)^(1/3).
  for (double k : {0.3, 0.9, 1.7}) {
    CHECK(m.X2(k) == Approx(-std::cbrt(0.5 * k)).epsilon(1e-12));
    CHECK(m.dX2(k) == Approx(-std::cbrt(0.5) / 3.0 * std::pow(k, -2.0 / 3.0)).epsilon(1e-9));
    // Potential K3(k) = (kmax^2 - k^2) / 3.
    CHECK(m.K3(k) == Approx((4.0 - k * k) / 3.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(m.X2(0.1), DomainError);
  CHECK_THROWS_AS(m.K3(2.5), DomainError);
  // kappa3 = d/dtheta K3(kappa2[theta]).
  const double t = 0.25 * kPi, h = 1e-5;
  const double dk = (m.K3(curvature_coeffs(t + h, body).kappa2) - m.K3(curvature_coeffs(t - h, body).kappa2)) / (2 * h);
  CHECK(std::abs(kK3 - dk) / std::abs(kK3) < 1e-6);
}

TEST_CASE("distance and frames") {
  auto d = distance({-2.4, 0.0}, body);
  CHECK(d.dist == Approx(0.1).epsilon(1e-13));
  CHECK(d.wall == Wall::lower);
  auto u = distance({2.4, 0.0}, body);
  CHECK(u.dist == Approx(0.1).epsilon(1e-13));
  CHECK(u.wall == Wall::upper);
  CHECK(distance({0.0, 0.0}, body).dist == Approx(2.5));
  CHECK_THROWS_AS(distance({2.6, 0.0}, body), AdmissibilityError);
  auto f = frame({1.5, 0.3}, body);
  auto g = lower_frame({-1.5, -0.3}, body);
  CHECK(f.dist == Approx(g.dist).epsilon(1e-15));
  CHECK(f.kappa3 == Approx(g.kappa3).epsilon(1e-15));
  CHECK(f.wall == Wall::upper);
}

TEST_CASE("pinch constants") {
  auto c = pinch_constants(body, 32, 32);
  CHECK(c.c1 > 0.0);
  CHECK(c.c2 > c.c1);
  for (int i = 0; i < 32; ++i) {
    const double t = -1.5 + 3.0 * i / 31.0;
    for (int j = 1; j <= 16; ++j) {
      const double tau = body.lambda_star * (j / 16.0) * (j % 2 ? 1 : -1);
      const double r = gap_rise(t, tau, body) / (tau * tau);
      CHECK(r >= c.c1);
      CHECK(r <= c.c2);
      const double dr = std::abs(dtheta_gap_profile(t, tau, body) - dtheta_contact(t, body).x2) / (tau * tau);
      CHECK(dr <= std::max(std::abs(c.c3), std::abs(c.c4)));
    }
  }
}
