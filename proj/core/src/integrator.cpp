#include "cgap/integrator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace cgap::ode {

double error_norm(const Vec& err, const Vec& a, const Vec& b, const Tolerances& tol) {
  double s = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = tol.abs + tol.rel * std::max(std::abs(a[i]), std::abs(b[i]));
    const double r = err[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(1, err.size())));
}

double dp45_step(const Rhs& f, double t, const Vec& y, const Vec& f0, double dt, Vec& y1, Vec& f1,
                 const Tolerances& tol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  // b - b* of the embedded fourth-order solution
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  const std::size_t n = y.size();
  Vec k2(n), k3(n), k4(n), k5(n), k6(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * a21 * f0[i];
  f(t + c2 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * (a31 * f0[i] + a32 * k2[i]);
  f(t + c3 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * (a41 * f0[i] + a42 * k2[i] + a43 * k3[i]);
  f(t + c4 * dt, tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + dt * (a51 * f0[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(t + c5 * dt, tmp, k5);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + dt * (a61 * f0[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f(t + dt, tmp, k6);
  y1.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    y1[i] = y[i] + dt * (b1 * f0[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  f1.resize(n);
  f(t + dt, y1, f1);
  Vec err(n);
  for (std::size_t i = 0; i < n; ++i)
    err[i] = dt * (e1 * f0[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * f1[i]);
  return error_norm(err, y, y1, tol);
}

bool trapezoid_step(const Rhs& f, double t, const Vec& y, const Vec& f0, double dt, Vec& y1, Vec& f1,
                    const Tolerances& tol) {
  const int n = static_cast<int>(y.size());
  y1.resize(n);
  f1.resize(n);
  for (int i = 0; i < n; ++i) y1[i] = y[i] + dt * f0[i];  // explicit Euler predictor
  Eigen::MatrixXd J(n, n);
  Vec fp(n), yp(n);
  for (int it = 0; it < 25; ++it) {
    f(t + dt, y1, f1);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = y1[i] - y[i] - 0.5 * dt * (f0[i] + f1[i]);
    if (it == 0 || it % 4 == 0) {
      for (int j = 0; j < n; ++j) {
        yp = y1;
        const double h = 1e-7 * std::max(1.0, std::abs(y1[j]));
        yp[j] += h;
        f(t + dt, yp, fp);
        for (int i = 0; i < n; ++i) J(i, j) = (i == j ? 1.0 : 0.0) - 0.5 * dt * (fp[i] - f1[i]) / h;
      }
    }
    const Eigen::VectorXd dy = J.partialPivLu().solve(r);
    Vec d(n);
    for (int i = 0; i < n; ++i) {
      y1[i] -= dy[i];
      d[i] = dy[i];
    }
    if (!std::isfinite(dy.norm())) return false;
    if (error_norm(d, y, y1, tol) < 1e-3) {
      f(t + dt, y1, f1);
      return true;
    }
  }
  return false;
}

Integrator::Integrator(Rhs f, const IntegratorOptions& opt, Guard guard)
    : f_(std::move(f)), opt_(opt), guard_(std::move(guard)), dt_(opt.dt_init),
      history_(static_cast<std::size_t>(std::max(1, opt.window)), 0) {}

void Integrator::record(bool rejected) {
  history_[pos_] = rejected ? 1 : 0;
  pos_ = (pos_ + 1) % history_.size();
}

double Integrator::reject_rate() const {
  double s = 0.0;
  for (char c : history_) s += c;
  return s / static_cast<double>(history_.size());
}

void Integrator::advance(double& t, Vec& y, double t_end, const StepHook& hook) {
  const std::size_t n = y.size();
  Vec f0(n), y1(n), f1(n), ya(n), fa(n);
  f_(t, y, f0);
  while (t < t_end) {
    const double remaining = t_end - t;
    double dt = std::min({dt_, opt_.dt_max, remaining});
    // Avoid leaving a sliver before the target.
    if (remaining - dt < 1e-3 * dt) dt = remaining;
    if (dt < opt_.dt_min * std::max(1.0, std::abs(t)))
      throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));

    const bool implicit = implicit_left_ > 0;
    double err = 0.0;
    double order = 5.0;
    if (!implicit) {
      err = dp45_step(f_, t, y, f0, dt, y1, f1, opt_.tol);
    } else {
      order = 2.0;
      // Step doubling for the error estimate.
      const bool ok = trapezoid_step(f_, t, y, f0, dt, ya, fa, opt_.tol) &&
                      trapezoid_step(f_, t, y, f0, 0.5 * dt, y1, f1, opt_.tol);
      Vec fm = f1, ym = y1;
      const bool ok2 = ok && trapezoid_step(f_, t + 0.5 * dt, ym, fm, 0.5 * dt, y1, f1, opt_.tol);
      if (!ok2) {
        err = 1e3;
      } else {
        Vec e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = (y1[i] - ya[i]) / 3.0;
        err = error_norm(e, y, y1, opt_.tol);
      }
    }
    if (!std::isfinite(err)) err = 1e3;
    if (err > 1.0) {
      ++stats_.rejected;
      record(true);
      dt_ = dt * std::max(0.1, 0.9 * std::pow(err, -1.0 / order));
    } else {
      const double g = guard_ ? guard_(t, y, y1) : 1.0;
      if (g < 1.0) {
        ++stats_.guard_rejected;
        record(true);
        dt_ = dt * std::clamp(g, 0.05, 0.9);
      } else {
        const double t0 = t;
        const Vec y0 = y;
        t = (dt == remaining) ? t_end : t + dt;
        y = y1;
        f0 = f1;
        ++stats_.accepted;
        record(false);
        if (implicit) {
          ++stats_.implicit;
          --implicit_left_;
        }
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -1.0 / order) : 5.0;
        // Keep the unclipped proposal when the step was shortened to hit t_end.
        if (dt == std::min(dt_, opt_.dt_max) || grow < 1.0) dt_ = dt * std::clamp(grow, 0.2, 5.0);
        if (hook) hook(t0, y0, t, y);
      }
    }
    if (implicit_left_ == 0 && reject_rate() > opt_.reject_threshold) {
      implicit_left_ = opt_.implicit_steps;
      ++stats_.switches;
      std::fill(history_.begin(), history_.end(), 0);
    }
  }
}

} // namespace cgap::ode
