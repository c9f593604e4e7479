#include "cgap/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "cgap/errors.hpp"

namespace cgap::fit {

LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size()) throw DomainError("fit: size mismatch");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (x.size() < 2 || !(std::abs(det) > 1e-300)) throw DomainError("fit: degenerate abscissae");
  LineFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / sw;
  double r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    r += w[i] * e * e;
  }
  f.rms = std::sqrt(r / sw);
  return f;
}

LineFit loglog_slope(const std::vector<double>& d, const std::vector<double>& y, double d_fit_max) {
  std::vector<double> lx, ly, w;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > d_fit_max * (1 + 1e-12)) continue;
    const double ay = std::abs(y[i]);
    if (!(ay > 0) || !std::isfinite(ay)) throw DomainError("fit: zero or non-finite sample");
    lx.push_back(std::log10(d[i]));
    ly.push_back(std::log10(ay));
    w.push_back(1.0 + std::log10(d_fit_max / d[i]));
  }
  return weighted_line(lx, ly, w);
}

namespace {

struct Projection {
  double res = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
};

Projection project(const std::vector<double>& d, const std::vector<double>& y,
                   const std::vector<double>& w, double a, double s) {
  // Rows scaled by sqrt(w)/|y| so residuals are relative.
  double m00 = 0, m01 = 0, m11 = 0, r0 = 0, r1 = 0, yy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double sc = std::sqrt(w[i]) / std::abs(y[i]);
    const double b0 = sc * std::pow(d[i], a), b1 = sc * std::pow(d[i], a + s), t = sc * y[i];
    m00 += b0 * b0;
    m01 += b0 * b1;
    m11 += b1 * b1;
    r0 += b0 * t;
    r1 += b1 * t;
    yy += t * t;
  }
  Projection p;
  const double det = m00 * m11 - m01 * m01;
  if (!(std::abs(det) > 1e-300 * (m00 * m11))) {
    p.c0 = r0 / m00;
    p.res = yy - p.c0 * r0;
    return p;
  }
  p.c0 = (m11 * r0 - m01 * r1) / det;
  p.c1 = (m00 * r1 - m01 * r0) / det;
  p.res = std::max(0.0, yy - p.c0 * r0 - p.c1 * r1);
  return p;
}

} // namespace

PowerFit power_law_with_correction(const std::vector<double>& d, const std::vector<double>& y,
                                   double d_fit_max, double s, double a_lo, double a_hi) {
  std::vector<double> dd, yy, w;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > d_fit_max * (1 + 1e-12)) continue;
    if (!(std::abs(y[i]) > 0) || !std::isfinite(y[i])) throw DomainError("fit: zero or non-finite sample");
    dd.push_back(d[i]);
    yy.push_back(y[i]);
    w.push_back(1.0 + std::log10(d_fit_max / d[i]));
  }
  if (dd.size() < 4) throw DomainError("fit: need at least four samples");
  const int n = 900;
  double best = a_lo, rbest = 1e300;
  for (int i = 0; i <= n; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / n;
    const double r = project(dd, yy, w, a, s).res;
    if (r < rbest) { rbest = r; best = a; }
  }
  const double h = (a_hi - a_lo) / n;
  double lo = best - h, hi = best + h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    if (project(dd, yy, w, x1, s).res < project(dd, yy, w, x2, s).res) hi = x2; else lo = x1;
  }
  PowerFit f;
  f.exponent = 0.5 * (lo + hi);
  const Projection p = project(dd, yy, w, f.exponent, s);
  f.lead = p.c0;
  f.correction = p.c0 != 0.0 ? p.c1 / p.c0 : 0.0;
  double sw = 0;
  for (double x : w) sw += x;
  f.rms = std::sqrt(p.res / sw);
  return f;
}

std::vector<double> logspace(double lo, double hi, int per_decade) {
  const double a = std::log10(lo), b = std::log10(hi);
  const int n = std::max(1, static_cast<int>(std::lround((b - a) * per_decade)));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / n));
  return out;
}

double richardson(double f_d, double f_small, double ratio, double p) {
  const double r = std::pow(ratio, p);
  return (r * f_small - f_d) / (r - 1.0);
}

} // namespace cgap::fit
