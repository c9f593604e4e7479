#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "cgap/errors.hpp"

namespace cgap::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  unsigned max_depth = 20;
  // Multiplier on the requested tolerance before a failure is reported.
  double slack = 50.0;
};

struct Outcome {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

void report_failure(const char* where, const Outcome& o, const Options& opt);

// Adaptive 15-point Gauss-Kronrod on [a,b]; throws QuadratureError when the
// estimated error exceeds slack * max(rel_tol * L1, abs_tol).
template <class F>
Outcome kronrod(F&& f, double a, double b, const Options& opt = {}) {
  Outcome o;
  if (a == b) return o;
  o.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, opt.max_depth, opt.rel_tol, &o.error, &o.l1);
  const double target = std::max(opt.rel_tol * o.l1, opt.abs_tol);
  if (!std::isfinite(o.value) || o.error > opt.slack * target + 1e3 * std::numeric_limits<double>::min())
    report_failure("kronrod", o, opt);
  return o;
}

template <class F>
double integrate(F&& f, double a, double b, const Options& opt = {}) {
  return kronrod(f, a, b, opt).value;
}

// Integral over [-lam, lam] of a function peaked at the origin with width
// sqrt(dist): substitute tau = sqrt(dist) * tan(phi).
template <class F>
Outcome gap_kronrod(F&& f, double dist, double lam, const Options& opt = {}) {
  const double sd = std::sqrt(dist);
  const double pm = std::atan(lam / sd);
  auto g = [&](double phi) {
    const double c = std::cos(phi);
    return f(sd * std::tan(phi)) * sd / (c * c);
  };
  return kronrod(g, -pm, pm, opt);
}

template <class F>
double gap_integrate(F&& f, double dist, double lam, const Options& opt = {}) {
  return gap_kronrod(f, dist, lam, opt).value;
}

// Same substitution on [a,b] with a <= 0 <= b not required.
template <class F>
double gap_integrate_ab(F&& f, double dist, double a, double b, const Options& opt = {}) {
  const double sd = std::sqrt(dist);
  auto g = [&](double phi) {
    const double c = std::cos(phi);
    return f(sd * std::tan(phi)) * sd / (c * c);
  };
  return kronrod(g, std::atan(a / sd), std::atan(b / sd), opt).value;
}

// Integral over [-lam, lam] folded onto [0, lam] as f(tau) + f(-tau), with
// tau = sqrt(dist) sinh(u). Folding keeps odd parts accurate when the
// integrand is nearly even; the sinh map resolves both the core of width
// sqrt(dist) and the algebraic tails out to lam.
template <class F>
Outcome gap_fold(F&& f, double dist, double lam, const Options& opt = {}) {
  const double sd = std::sqrt(dist);
  const double ub = std::asinh(lam / sd);
  auto g = [&](double u) {
    const double t = sd * std::sinh(u);
    return (f(t) + f(-t)) * sd * std::cosh(u);
  };
  // The fold cancels the odd part in floating point; do not ask for more
  // relative accuracy than that cancellation leaves.
  auto mag = [&](double u) {
    const double t = sd * std::sinh(u);
    return (std::abs(f(t)) + std::abs(f(-t))) * sd * std::cosh(u);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double M = GK::integrate(mag, 0.0, ub, 0);
  const double V = std::abs(GK::integrate(g, 0.0, ub, 0));
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * M;
  Options o = opt;
  if (V > 0.0) o.rel_tol = std::max(opt.rel_tol, noise / V);
  o.abs_tol = std::max(opt.abs_tol, noise);
  return kronrod(g, 0.0, ub, o);
}

// Double-exponential rule, robust to endpoint singularities.
template <class F>
double tanh_sinh(F&& f, double a, double b, const Options& opt = {}) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  double err = 0.0, l1 = 0.0;
  const double v = ts.integrate(f, a, b, opt.rel_tol, &err, &l1);
  Outcome o{v, err, l1};
  if (!std::isfinite(v) || err > opt.slack * std::max(opt.rel_tol * l1, opt.abs_tol) + 1e-300)
    report_failure("tanh_sinh", o, opt);
  return v;
}

// Fixed N-point Gauss-Legendre on [a,b].
template <unsigned N, class F>
double legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

} // namespace cgap::quad
