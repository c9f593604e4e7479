#pragma once

#include <cmath>

namespace cgap {

// Second-order forward jet in two variables: value, gradient and Hessian
// (h[0]=f_11, h[1]=f_12, h[2]=f_22).
struct Jet2 {
  double v = 0.0;
  double d[2] = {0.0, 0.0};
  double h[3] = {0.0, 0.0, 0.0};

  Jet2() = default;
  Jet2(double c) : v(c) {}

  static Jet2 var(double x, int k) {
    Jet2 j(x);
    j.d[k] = 1.0;
    return j;
  }

  // f(this) given f, f', f'' at v.
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r(f0);
    r.d[0] = f1 * d[0];
    r.d[1] = f1 * d[1];
    r.h[0] = f1 * h[0] + f2 * d[0] * d[0];
    r.h[1] = f1 * h[1] + f2 * d[0] * d[1];
    r.h[2] = f1 * h[2] + f2 * d[1] * d[1];
    return r;
  }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v + b.v);
  for (int i = 0; i < 2; ++i) r.d[i] = a.d[i] + b.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = a.h[i] + b.h[i];
  return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v - b.v);
  for (int i = 0; i < 2; ++i) r.d[i] = a.d[i] - b.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = a.h[i] - b.h[i];
  return r;
}
inline Jet2 operator-(const Jet2& a) { return Jet2(0.0) - a; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v * b.v);
  r.d[0] = a.d[0] * b.v + a.v * b.d[0];
  r.d[1] = a.d[1] * b.v + a.v * b.d[1];
  r.h[0] = a.h[0] * b.v + 2.0 * a.d[0] * b.d[0] + a.v * b.h[0];
  r.h[1] = a.h[1] * b.v + a.d[0] * b.d[1] + a.d[1] * b.d[0] + a.v * b.h[1];
  r.h[2] = a.h[2] * b.v + 2.0 * a.d[1] * b.d[1] + a.v * b.h[2];
  return r;
}
inline Jet2 operator*(double s, const Jet2& a) {
  Jet2 r(s * a.v);
  for (int i = 0; i < 2; ++i) r.d[i] = s * a.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = s * a.h[i];
  return r;
}
inline Jet2 operator*(const Jet2& a, double s) { return s * a; }
inline Jet2 operator+(const Jet2& a, double s) {
  Jet2 r = a;
  r.v += s;
  return r;
}
inline Jet2 operator+(double s, const Jet2& a) { return a + s; }
inline Jet2 operator-(const Jet2& a, double s) { return a + (-s); }
inline Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }
inline Jet2 inv(const Jet2& a) {
  const double i = 1.0 / a.v;
  return a.chain(i, -i * i, 2.0 * i * i * i);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(const Jet2& a, double s) { return (1.0 / s) * a; }
inline Jet2 operator/(double s, const Jet2& a) { return s * inv(a); }
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return a.chain(s, 0.5 / s, -0.25 / (s * a.v));
}

} // namespace cgap
