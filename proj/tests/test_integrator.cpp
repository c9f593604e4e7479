#include "doctest.h"

#include <cmath>

#include "cgap/integrator.hpp"

using namespace cgap::ode;
using doctest::Approx;

TEST_CASE("exponential decay") {
  Integrator it([](double, const Vec& y, Vec& dy) { dy = {-y[0]}; }, {{1e-11, 1e-14}});
  double t = 0.0;
  Vec y{1.0};
  it.advance(t, y, 3.0);
  CHECK(t == 3.0);
  CHECK(y[0] == Approx(std::exp(-3.0)).epsilon(1e-9));
  CHECK(it.stats().accepted > 0);
}

TEST_CASE("harmonic oscillator keeps its energy") {
  Integrator it([](double, const Vec& y, Vec& dy) { dy = {y[1], -y[0]}; }, {{1e-11, 1e-13}});
  double t = 0.0;
  Vec y{1.0, 0.0};
  it.advance(t, y, 20.0);
  CHECK(y[0] == Approx(std::cos(20.0)).epsilon(1e-8));
  CHECK(y[1] == Approx(-std::sin(20.0)).epsilon(1e-8));
}

TEST_CASE("advance ends exactly on the requested time and hooks see every step") {
  Integrator it([](double tt, const Vec&, Vec& dy) { dy = {std::cos(tt)}; });
  double t = 0.0, last = 0.0;
  int calls = 0;
  Vec y{0.0};
  for (double te : {0.5, 1.25, 2.0}) {
    it.advance(t, y, te, [&](double t0, const Vec&, double t1, const Vec&) {
      CHECK(t0 == last);
      last = t1;
      ++calls;
    });
    CHECK(t == te);
  }
  CHECK(calls == it.stats().accepted);
  CHECK(y[0] == Approx(std::sin(2.0)).epsilon(1e-7));
}

TEST_CASE("guard shrinks steps") {
  int vetoes = 0;
  Integrator it([](double, const Vec& y, Vec& dy) { dy = {1.0 + 0 * y[0]}; }, {},
                [&](double, const Vec& y0, const Vec& y1) {
                  if (y1[0] - y0[0] > 0.01) {
                    ++vetoes;
                    return 0.5;
                  }
                  return 1.0;
                });
  double t = 0.0;
  Vec y{0.0};
  it.advance(t, y, 1.0);
  CHECK(y[0] == Approx(1.0).epsilon(1e-12));
  CHECK(it.stats().guard_rejected == vetoes);
  CHECK(vetoes > 0);
}

TEST_CASE("stiff problem is integrated") {
  const double k = 1e5;
  Integrator it([k](double tt, const Vec& y, Vec& dy) { dy = {-k * (y[0] - std::cos(tt))}; }, {{1e-8, 1e-10}});
  double t = 0.0;
  Vec y{1.0};
  it.advance(t, y, 1.0);
  CHECK(std::abs(y[0] - std::cos(1.0)) < 1e-4);
}

TEST_CASE("trapezoid step on a linear problem") {
  const Rhs f = [](double, const Vec& y, Vec& dy) { dy = {-2.0 * y[0]}; };
  Vec y{1.0}, f0{-2.0}, y1, f1;
  REQUIRE(trapezoid_step(f, 0.0, y, f0, 0.1, y1, f1, {1e-12, 1e-14}));
  // (1 - dt) / (1 + dt) for lambda = -2.
  CHECK(y1[0] == Approx(0.9 / 1.1).epsilon(1e-10));
}

TEST_CASE("error norm") {
  CHECK(error_norm({0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}, {}) == 0.0);
  const double n = error_norm({1e-9}, {1.0}, {1.0}, {1e-9, 0.0});
  CHECK(n == Approx(1.0));
}
