#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace cgap::ode {

using Vec = std::vector<double>;
// dy = f(t, y)
using Rhs = std::function<void(double, const Vec&, Vec&)>;

struct Tolerances {
  double rel = 1e-9;
  double abs = 1e-12;
};

// Weighted RMS norm of err against atol + rtol max(|a|, |b|).
double error_norm(const Vec& err, const Vec& a, const Vec& b, const Tolerances& tol);

// One Dormand-Prince 5(4) step from (t, y) with f0 = f(t, y). Writes the
// fifth-order solution and f(t + dt, y1) (first stage of the next step) and
// returns the embedded error norm.
double dp45_step(const Rhs& f, double t, const Vec& y, const Vec& f0, double dt, Vec& y1, Vec& f1,
                 const Tolerances& tol);

// Implicit trapezoidal step solved by Newton iteration with a finite-difference
// Jacobian. Returns false when Newton does not converge.
bool trapezoid_step(const Rhs& f, double t, const Vec& y, const Vec& f0, double dt, Vec& y1, Vec& f1,
                    const Tolerances& tol);

class StepSizeUnderflow : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
  Tolerances tol;
  double dt_init = 1e-3;
  double dt_min = 1e-13;  // relative to max(1, |t|)
  double dt_max = 1e300;
  // Switch to the implicit trapezoidal rule for implicit_steps accepted steps
  // once more than reject_threshold of the last `window` attempts were rejected.
  int window = 16;
  double reject_threshold = 0.5;
  int implicit_steps = 32;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;        // error-control rejections
  long guard_rejected = 0;  // rejections by the user guard
  long implicit = 0;        // accepted trapezoidal steps
  long switches = 0;        // explicit -> implicit switches
};

// Guard on a candidate step: return 1 to accept, or a factor in (0, 1) to
// retry with dt scaled by it.
using Guard = std::function<double(double t, const Vec& y0, const Vec& y1)>;
// Called after each accepted step with the step end point.
using StepHook = std::function<void(double t0, const Vec& y0, double t1, const Vec& y1)>;

class Integrator {
public:
  Integrator(Rhs f, const IntegratorOptions& opt = {}, Guard guard = {});

  // Advances (t, y) to exactly t_end.
  void advance(double& t, Vec& y, double t_end, const StepHook& hook = {});
  const IntegratorStats& stats() const { return stats_; }
  double dt() const { return dt_; }

private:
  Rhs f_;
  IntegratorOptions opt_;
  Guard guard_;
  IntegratorStats stats_;
  double dt_;
  int implicit_left_ = 0;
  std::vector<char> history_;  // 1 = rejected attempt
  std::size_t pos_ = 0;
  void record(bool rejected);
  double reject_rate() const;
};

} // namespace cgap::ode
