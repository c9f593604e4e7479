#include "doctest.h"

#include <cmath>

#include "cgap/flowfield.hpp"

using namespace cgap;
using namespace cgap::flow;
using doctest::Approx;

TEST_CASE("nondimensional groups") {
  PhysicalParams p;
  p.mu = 2.0;
  p.rho = 3.0;
  p.d = 0.5;
  p.delta = 0.2;
  p.Lcal = 1.5;
  p.P0 = 4.0;
  p.Mcal = 0.7;
  p.Jcal = 0.05;
  const auto q = nondimensionalize(p);
  CHECK(q.e == Approx(0.4));
  CHECK(q.L == Approx(3.0));
  CHECK(q.p0 == Approx(4.0 * 3.0 * 0.125 / 4.0));
  CHECK(q.lambda0 == Approx(0.5 * q.p0 * 9.0));
  CHECK(q.m == Approx(0.7 / (3.0 * 0.25)));
  CHECK(q.J == Approx(0.05 / (3.0 * 0.0625)));

  p.delta = 0.6;
  CHECK_THROWS_AS(nondimensionalize(p), DomainError);
  p.delta = 0.2;
  p.Lcal = 0.9;
  CHECK_THROWS_AS(nondimensionalize(p), DomainError);
}

TEST_CASE("from_lambda0 inverts the pressure group") {
  const auto p = DimlessParams::from_lambda0(0.5, 3.0, 0.2, 1.0, 1.0);
  CHECK(0.5 * p.p0 * p.L * p.L == Approx(0.2));
}

TEST_CASE("poiseuille profile") {
  const auto p = DimlessParams::from_lambda0(0.5, 3.0, 0.3, 1.0, 1.0);
  CHECK(poiseuille(0.0, p).v1 == Approx(0.3));
  CHECK(std::abs(poiseuille(3.0, p).v1) < 1e-15);
  CHECK(std::abs(poiseuille(-3.0, p).v1) < 1e-15);
  CHECK(poiseuille(1.5, p).v1 == Approx(0.3 * 0.75));
  CHECK(poiseuille(1.0, p).v2 == 0.0);
  CHECK_THROWS_AS(poiseuille(3.1, p), DomainError);
}

TEST_CASE("branch weight") {
  CHECK(ExtensionField::chi(-1.0) == 0.0);
  CHECK(ExtensionField::chi(0.6) == 1.0);
  CHECK(ExtensionField::chi(0.375) > 0.0);
  CHECK(ExtensionField::chi(0.375) < 1.0);
  const double h = 0.33, e = 1e-6;
  CHECK(ExtensionField::dchi(h) ==
        Approx((ExtensionField::chi(h + e) - ExtensionField::chi(h - e)) / (2 * e)).epsilon(1e-6));
}

TEST_CASE("extension field is solenoidal and matches the walls") {
  for (double h : {-0.4, 0.0, 0.3}) {
    const ExtensionField f(3.0, 0.25, h);
    for (double x1 : {-4.0, -2.5, 0.3, 2.2})
      for (double x2 : {-2.7, -1.0, 0.4, 2.9}) {
        INFO("h=" << h << " x=" << x1 << "," << x2);
        CHECK(std::abs(f.div_residual(x1, x2, 1e-5)) < 1e-7);
        const auto s = f.eval(x1, x2);
        CHECK(std::abs(s.grad[0][0] + s.grad[1][1]) < 1e-12);
      }
    // No slip on both walls.
    for (double x1 : {-5.0, 0.0, 2.5}) {
      const auto lo = f.eval(x1, -3.0), hi = f.eval(x1, 3.0);
      CHECK(std::abs(lo.s1) < 1e-13);
      CHECK(std::abs(lo.s2) < 1e-13);
      CHECK(std::abs(hi.s1) < 1e-13);
      CHECK(std::abs(hi.s2) < 1e-13);
    }
    // Poiseuille far from the body, zero in the cutoff box.
    const auto p = DimlessParams::from_lambda0(0.5, 3.0, 0.25, 1.0, 1.0);
    CHECK(f.eval(6.0, 1.2).s1 == Approx(poiseuille(1.2, p).v1).epsilon(1e-13));
    CHECK(std::abs(f.eval(0.0, 0.1).s1) < 1e-15);
  }
}

TEST_CASE("source splits into linear and quadratic parts") {
  const ExtensionField a(3.0, 0.2, 0.1), b(3.0, 0.4, 0.1);
  for (double x1 : {-2.6, 2.4})
    for (double x2 : {-1.5, 1.8}) {
      const auto sa = a.eval(x1, x2), sb = b.eval(x1, x2);
      CHECK(sb.glin1 == Approx(2 * sa.glin1).epsilon(1e-12));
      CHECK(sb.gnl1 == Approx(4 * sa.gnl1).epsilon(1e-12));
      CHECK(sa.g1 == Approx(sa.glin1 + sa.gnl1).epsilon(1e-12));
      CHECK(sa.g2 == Approx(sa.glin2 + sa.gnl2).epsilon(1e-12));
    }
  CHECK(std::isfinite(source_l2(a)));
  CHECK(source_l2(b) > source_l2(a));
  CHECK(w1inf_norm(a) > 0.0);
}

TEST_CASE("zero lambda0 gives the zero field") {
  const ExtensionField f(3.0, 0.0, 0.2);
  const auto s = f.eval(2.5, -1.0);
  CHECK(s.s1 == 0.0);
  CHECK(s.g1 == 0.0);
  CHECK(source_l2(f) == 0.0);
}
