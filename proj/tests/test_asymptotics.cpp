#include "doctest.h"

#include <cmath>

#include "cgap/asymptotics.hpp"

using namespace cgap;
using namespace cgap::asym;
using doctest::Approx;

namespace {
const geometry::ChannelBody body(0.5, 3.0);
constexpr double kPi = geometry::kPi;
} // namespace

TEST_CASE("I_pq against elementary antiderivatives") {
  for (double k : {0.25, 1.0, 3.7}) {
    const double s = std::sqrt(k);
    CHECK(I_pq(0, 1, k) == Approx(kPi / s).epsilon(1e-14));
    CHECK(I_pq(0, 2, k) == Approx(kPi / (2 * s)).epsilon(1e-14));
    CHECK(I_pq(2, 2, k) == Approx(kPi / (2 * k * s)).epsilon(1e-14));
    CHECK(I_pq(0, 3, k) == Approx(3 * kPi / (8 * s)).epsilon(1e-14));
    CHECK(I_pq(2, 3, k) == Approx(kPi / (8 * k * s)).epsilon(1e-14));
    CHECK(I_pq(4, 3, k) == Approx(3 * kPi / (8 * k * k * s)).epsilon(1e-14));
    CHECK(I_pq(3, 3, k) == 0.0);
  }
}

TEST_CASE("I_pq domain") {
  CHECK_THROWS_AS(I_pq(2, 1, 1.0), DomainError);
  CHECK_THROWS_AS(I_pq(0, 1, 0.0), DomainError);
  CHECK_THROWS_AS(I_pq(-1, 2, 1.0), DomainError);
}

TEST_CASE("Beta values agree with truncated quadrature") {
  for (int q = 1; q <= 4; ++q)
    for (int p = 0; p < 2 * q - 1; p += 2) {
      const auto c = I_pq_crosscheck(p, q, 0.7);
      CHECK(c.rel_diff < 1e-10);
      CHECK(c.tail_bound <= 1e-13 * c.beta);
    }
}

TEST_CASE("predicted exponents") {
  CHECK(predicted_exponent(0, 1).value == -0.5);
  CHECK(predicted_exponent(2, 2).value == -0.5);
  CHECK(predicted_exponent(4, 3).value == -0.5);
  CHECK(predicted_exponent(0, 3).value == -2.5);
  CHECK(predicted_exponent(1, 2).value == -0.5);
  CHECK(predicted_exponent(3, 3).value == -0.5);
  CHECK(predicted_exponent(2, 1).bounded);
  CHECK(predicted_exponent(3, 2).bounded);
  CHECK_FALSE(predicted_exponent(1, 2).bounded);
}

TEST_CASE("fitted exponents of the gap integrals") {
  const auto rows = exponent_suite(body, {0.0, 0.6}, {0, 1, 2, 3, 4}, {1, 2, 3});
  CHECK(rows.size() == 30);
  for (const auto& r : rows) {
    INFO("p=" << r.p << " q=" << r.q << " theta=" << r.theta << " fitted=" << r.fitted);
    CHECK(r.pass);
    // Odd moments vanish by symmetry of the flat-bottom pose.
    if (r.theta == 0.0 && r.p % 2 == 1) CHECK(r.exact_zero);
  }
}

TEST_CASE("gap integral approaches the parabolic limit") {
  // int 1/g^2 ~ d^(-3/2) I_{0,2}(kappa2) for g ~ d + kappa2 tau^2.
  const auto cc = geometry::curvature_coeffs(0.0, body);
  for (double d : {1e-6, 1e-8}) {
    const auto ctx = lub::gap_context(0.0, d, body);
    const double v = gap_integral(0, 2, ctx) * std::pow(d, 1.5);
    CHECK(v == Approx(I_pq(0, 2, cc.kappa2)).epsilon(20 * std::sqrt(d)));
  }
}

TEST_CASE("kappa profile tables the Beta integrals") {
  for (double k : {0.3, 0.6, 0.95}) {
    const auto p = kappa_profile(k, body);
    CHECK(p.kappa2 == k);
    CHECK(p.I[2][2] == Approx(I_pq(2, 2, k)).epsilon(1e-14));
    CHECK(p.I[4][3] == Approx(I_pq(4, 3, k)).epsilon(1e-14));
    CHECK(p.I[0][1] == Approx(I_pq(0, 1, k)).epsilon(1e-14));
    CHECK(std::isnan(p.I[2][1]));
    CHECK(p.x2 <= -body.e);
    CHECK(p.x2 >= -1.0);
  }
  CHECK(kappa_profile(0.25, body).x2 == Approx(-0.5).epsilon(1e-12));
}
