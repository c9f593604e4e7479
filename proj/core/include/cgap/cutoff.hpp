#pragma once

#include <array>

namespace cgap {

// Quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3 clamped to [0,1], with
// derivatives up to third order. C2 across the clamp points.
inline std::array<double, 4> smoothstep(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0, 0.0};
  const double t2 = t * t, t3 = t2 * t;
  return {t3 * (10.0 + t * (-15.0 + 6.0 * t)), 30.0 * t2 * (1.0 - t) * (1.0 - t),
          60.0 * t * (1.0 - t) * (1.0 - 2.0 * t), 60.0 * (1.0 - 6.0 * t + 6.0 * t2)};
}

// Plateau cutoff: 1 for |x| <= a, 0 for |x| >= b, derivatives in x.
inline std::array<double, 4> plateau(double x, double a, double b) {
  const double ax = x < 0 ? -x : x;
  const double sg = x < 0 ? -1.0 : 1.0;
  const double w = b - a;
  const auto s = smoothstep((b - ax) / w);
  return {s[0], -sg * s[1] / w, s[2] / (w * w), -sg * s[3] / (w * w * w)};
}

// Step from 1 (x <= a) down to 0 (x >= b), derivatives in x.
inline std::array<double, 4> step_down(double x, double a, double b) {
  const double w = b - a;
  const auto s = smoothstep((b - x) / w);
  return {s[0], -s[1] / w, s[2] / (w * w), -s[3] / (w * w * w)};
}

} // namespace cgap
