#include "cgap/geometry.hpp"

#include <algorithm>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "cgap/quadrature.hpp"

namespace cgap::geometry {

ChannelBody::ChannelBody(double e_, double L_, double lambda_star_)
    : e(e_), L(L_), lambda_star(lambda_star_ < 0.0 ? default_lambda_star(e_) : lambda_star_) {
  if (!(e > 0.0 && e < 1.0)) throw DomainError("aspect ratio e must lie in (0,1)");
  if (!(L > 2.0)) throw DomainError("channel half-width L must exceed 2");
  if (!(lambda_star > 0.0 && lambda_star <= e)) throw DomainError("lambda_star must lie in (0, e]");
}

double ChannelBody::graph_margin(double e) {
  // Coarse scan then golden refinement of halfwidth - |x1| on [0, pi/2].
  auto margin = [e](double t) {
    const double s = std::sin(t), c = std::cos(t);
    const double r = std::sqrt(s * s + e * e * c * c);
    return std::sqrt(e * e * s * s + c * c) - (1.0 - e * e) * c * s / r;
  };
  const int n = 512;
  int best = 0;
  double mbest = margin(0.0);
  for (int i = 1; i <= n; ++i) {
    const double m = margin(0.5 * kPi * i / n);
    if (m < mbest) { mbest = m; best = i; }
  }
  double a = 0.5 * kPi * std::max(best - 1, 0) / n, b = 0.5 * kPi * std::min(best + 1, n) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double x = b - g * (b - a), y = a + g * (b - a);
    if (margin(x) < margin(y)) b = y; else a = x;
  }
  return std::min(mbest, margin(0.5 * (a + b)));
}

double ChannelBody::default_lambda_star(double e) { return 0.4 * graph_margin(e); }

const char* to_string(Wall w) { return w == Wall::lower ? "lower" : "upper"; }

double reduce_angle(double theta) {
  double t = std::fmod(theta, kPi);
  if (t > 0.5 * kPi) t -= kPi;
  if (t <= -0.5 * kPi) t += kPi;
  return t;
}

void sincos_exact(double theta, double& s, double& c) {
  const double t = reduce_angle(theta);
  if (t == 0.0) { s = 0.0; c = 1.0; return; }
  if (t == 0.5 * kPi) { s = 1.0; c = 0.0; return; }
  s = std::sin(t);
  c = std::cos(t);
}

QuadCoeffs quad_coeffs(double theta, double e) {
  double s, c;
  sincos_exact(theta, s, c);
  const double ie2 = 1.0 / (e * e);
  return {c * c + s * s * ie2, 2.0 * s * c * (1.0 - ie2), s * s + c * c * ie2};
}

double level(double theta, double x1, double x2, double e) {
  const QuadCoeffs q = quad_coeffs(theta, e);
  return q.A * x1 * x1 + q.B * x1 * x2 + q.C * x2 * x2 - 1.0;
}

double graph_halfwidth(double theta, double e) {
  double s, c;
  sincos_exact(theta, s, c);
  return std::sqrt(e * e * s * s + c * c);
}

namespace {

double graph_disc(const QuadCoeffs& q, double x1, double e) {
  const double r = q.C - x1 * x1 / (e * e);
  if (r < -1e-14) throw DomainError("abscissa outside the vertical projection of the body");
  return std::sqrt(std::max(r, 0.0));
}

} // namespace

double graph_lower(double theta, double x1, double e) {
  const QuadCoeffs q = quad_coeffs(theta, e);
  return -0.5 * q.B / q.C * x1 - graph_disc(q, x1, e) / q.C;
}

double graph_upper(double theta, double x1, double e) {
  const QuadCoeffs q = quad_coeffs(theta, e);
  return -0.5 * q.B / q.C * x1 + graph_disc(q, x1, e) / q.C;
}

Point contact_point(double theta, const ChannelBody& body) {
  double s, c;
  sincos_exact(theta, s, c);
  const double e = body.e;
  const double r = std::sqrt(s * s + e * e * c * c);
  return {-(1.0 - e * e) * c * s / r, -r};
}

namespace {

void check_tau(double theta, double tau, const ChannelBody& body) {
  if (std::abs(tau) > 2.0 * body.lambda_star * (1.0 + 1e-12))
    throw DomainError("|tau| exceeds twice the gap half-length");
  const Point p = contact_point(theta, body);
  if (std::abs(tau + p.x1) > graph_halfwidth(theta, body.e))
    throw DomainError("tau outside the graph parametrization interval");
}

} // namespace

GapShape gap_shape(double theta, const ChannelBody& body) {
  GapShape g;
  g.theta = reduce_angle(theta);
  const QuadCoeffs q = quad_coeffs(g.theta, body.e);
  const Point p = contact_point(g.theta, body);
  g.x1 = p.x1;
  g.x2 = p.x2;
  g.e2 = body.e * body.e;
  g.C = q.C;
  g.s0 = std::sqrt(q.C - p.x1 * p.x1 / g.e2);
  g.halfwidth = graph_halfwidth(g.theta, body.e);
  return g;
}

// The linear terms of gamma(tau) - x2 cancel by tangency; the rewritten
// quotient keeps full relative precision as tau -> 0.
double gap_rise(double theta, double tau, const ChannelBody& body) {
  const GapShape g = gap_shape(theta, body);
  if (std::abs(g.x1 + tau) > g.halfwidth) throw DomainError("tau outside the graph chart");
  return g.rise(tau);
}

double gap_profile(double theta, double tau, const ChannelBody& body) {
  check_tau(theta, tau, body);
  return contact_point(theta, body).x2 + gap_rise(theta, tau, body);
}

GapProfileDerivs gap_profile_derivs(double theta, double tau, const ChannelBody& body) {
  check_tau(theta, tau, body);
  const double t = reduce_angle(theta);
  const QuadCoeffs q = quad_coeffs(t, body.e);
  const Point p = contact_point(t, body);
  const double e2 = body.e * body.e;
  const double x = p.x1 + tau;
  const double s = graph_disc(q, x, body.e);
  const double g1 = -0.5 * q.B / q.C + x / (e2 * q.C * s);
  const double g2 = (1.0 / (e2 * q.C)) * (1.0 / s + x * x / (e2 * s * s * s));
  return {p.x2 + gap_rise(t, tau, body), g1, g2};
}

Curvature curvature_coeffs(double theta, const ChannelBody& body) {
  double s, c;
  sincos_exact(theta, s, c);
  const double ie2 = 1.0 / (body.e * body.e);
  const double x2 = contact_point(theta, body).x2;
  const double k2 = -0.5 * x2 * (c * c + s * s * ie2);
  const double k3 = -c * s * x2 * k2 * (1.0 - ie2);
  return {k2, k3};
}

double dtheta_kappa2(double theta, const ChannelBody& body) {
  const double t = reduce_angle(theta);
  double s, c;
  sincos_exact(t, s, c);
  const double ie2 = 1.0 / (body.e * body.e);
  const Point p = contact_point(t, body);
  const double a = c * c + s * s * ie2;
  const double d = c * s * (1.0 - ie2);
  const Point dp = dtheta_contact(t, body);
  // kappa2 = -(x2/2) a with a' = -2d.
  return -0.5 * dp.x2 * a + p.x2 * d;
}

Point dtheta_contact(double theta, const ChannelBody& body) {
  const double t = reduce_angle(theta);
  double s, c;
  sincos_exact(t, s, c);
  const double ie2 = 1.0 / (body.e * body.e);
  const Point p = contact_point(t, body);
  const double a = c * c + s * s * ie2;
  const double b = s * s + c * c * ie2;
  const double d = c * s * (1.0 - ie2);
  const double da = -2.0 * d, db = 2.0 * d, dd = (c * c - s * s) * (1.0 - ie2);
  // Rows: derivative of the level condition (halved) and of the tangency condition.
  const double m11 = p.x1 * a + p.x2 * d, m12 = p.x2 * b + p.x1 * d;
  const double m21 = a, m22 = d;
  const double r1 = -0.5 * (da * p.x1 * p.x1 + db * p.x2 * p.x2 + 2.0 * dd * p.x1 * p.x2);
  const double r2 = -(da * p.x1 + dd * p.x2);
  const double det = m11 * m22 - m12 * m21;
  return {(r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det};
}

TaylorFit taylor_fit(double theta, const ChannelBody& body, double step) {
  const double h0 = step > 0.0 ? step : 1e-3 * body.lambda_star;
  auto f = [&](double tau) { return gap_rise(theta, tau, body); };
  auto d2 = [&](double h) { return (f(h) + f(-h)) / (h * h); };
  auto d3 = [&](double h) { return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h); };
  auto d4 = [&](double h) { return (f(2 * h) - 4 * f(h) - 4 * f(-h) + f(-2 * h)) / (h * h * h * h); };
  auto rich = [&](auto&& D) { return (4.0 * D(0.5 * h0) - D(h0)) / 3.0; };
  return {0.5 * rich(d2), rich(d3) / 6.0, rich(d4) / 24.0};
}

K2Maps::K2Maps(const ChannelBody& body)
    : body_(body), kmin_(body.kappa2_min()), kmax_(body.kappa2_max()) {}

void K2Maps::check(double kappa2) const {
  const double tol = 1e-12 * kmax_;
  if (kappa2 < kmin_ - tol || kappa2 > kmax_ + tol)
    throw DomainError("kappa2 outside [e/2, 1/(2 e^2)]");
}

double K2Maps::K2(double x2) const {
  const double e = body_.e;
  if (x2 > -e + 1e-14 || x2 < -1.0 - 1e-14) {
    if (x2 > -e + 1e-12 || x2 < -1.0 - 1e-12) throw DomainError("x2 outside [-1, -e]");
  }
  const double s2 = std::clamp((x2 * x2 - e * e) / (1.0 - e * e), 0.0, 1.0);
  return curvature_coeffs(std::asin(std::sqrt(s2)), body_).kappa2;
}

double K2Maps::theta_of(double kappa2) const {
  check(kappa2);
  const double k = std::clamp(kappa2, kmin_, kmax_);
  if (k <= kmin_) return 0.0;
  if (k >= kmax_) return 0.5 * kPi;
  auto f = [&](double t) { return curvature_coeffs(t, body_).kappa2 - k; };
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, 0.0, 0.5 * kPi, f(0.0), f(0.5 * kPi),
                                             boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

double K2Maps::X2(double kappa2) const { return contact_point(theta_of(kappa2), body_).x2; }

double K2Maps::dX2(double kappa2) const {
  const double t = theta_of(kappa2);
  const double x2 = contact_point(t, body_).x2;
  if (t < 1e-6) {
    // Both derivatives vanish at theta = 0; their ratio tends to -2 e^2 / (3 x2^2).
    return -2.0 * body_.e * body_.e / (3.0 * x2 * x2);
  }
  return dtheta_contact(t, body_).x2 / dtheta_kappa2(t, body_);
}

double K2Maps::k3_density(double kappa2) const {
  return kappa2 - kappa2 * kappa2 * dX2(kappa2) / X2(kappa2);
}

double K2Maps::K3(double kappa2) const {
  check(kappa2);
  quad::Options opt;
  opt.rel_tol = 1e-12;
  return quad::integrate([&](double xi) { return k3_density(xi); }, kappa2, kmax_, opt);
}

bool admissible(const Pose& pose, const ChannelBody& body) {
  double s, c;
  sincos_exact(pose.theta, s, c);
  return std::abs(pose.h) + std::sqrt(s * s + body.e * body.e * c * c) < body.L;
}

void require_admissible(const Pose& pose, const ChannelBody& body) {
  if (!admissible(pose, body))
    throw AdmissibilityError("pose (h=" + std::to_string(pose.h) + ", theta=" +
                             std::to_string(pose.theta) + ") is not admissible");
}

Pose mirror(const Pose& pose) { return {-pose.h, -pose.theta}; }

Distance distance(const Pose& pose, const ChannelBody& body) {
  require_admissible(pose, body);
  const double dl = pose.h + contact_point(pose.theta, body).x2 + body.L;
  const double du = -pose.h + contact_point(-pose.theta, body).x2 + body.L;
  if (pose.h > 0.0) return {du, Wall::upper};
  if (pose.h < 0.0) return {dl, Wall::lower};
  return dl <= du ? Distance{dl, Wall::lower} : Distance{du, Wall::upper};
}

GapFrame lower_frame(const Pose& pose, const ChannelBody& body) {
  require_admissible(pose, body);
  GapFrame f;
  f.h = pose.h;
  f.theta = reduce_angle(pose.theta);
  const Point p = contact_point(f.theta, body);
  const Curvature k = curvature_coeffs(f.theta, body);
  f.x1 = p.x1;
  f.x2 = p.x2;
  f.kappa2 = k.kappa2;
  f.kappa3 = k.kappa3;
  f.dist = pose.h + p.x2 + body.L;
  f.wall = Wall::lower;
  return f;
}

GapFrame frame(const Pose& pose, const ChannelBody& body) {
  const Distance d = distance(pose, body);
  if (d.wall == Wall::lower) return lower_frame(pose, body);
  GapFrame f = lower_frame(mirror(pose), body);
  f.wall = Wall::upper;
  return f;
}

double dtheta_gap_profile(double theta, double tau, const ChannelBody& body, double step) {
  return (gap_profile(theta + step, tau, body) - gap_profile(theta - step, tau, body)) / (2.0 * step);
}

PinchConstants pinch_constants(const ChannelBody& body, int n_theta, int n_tau, double window) {
  const double lam = window * body.lambda_star;
  const double ht = 1e-4;
  double c1 = 1e300, c2 = -1e300, c3 = 1e300, c4 = -1e300;
  for (int i = 0; i < n_theta; ++i) {
    const double t = -0.5 * kPi + kPi * (i + 0.5) / n_theta;
    // Third tau-derivatives by central differences of the analytic second derivative.
    double g3max = 0.0, dg3max = 0.0;
    auto g2 = [&](double th, double tau) { return gap_profile_derivs(th, tau, body).g2; };
    for (int j = 0; j <= n_tau; ++j) {
      const double tau = -lam + 2.0 * lam * j / n_tau;
      const double ts = tau;
      const double g3 = (g2(t, ts + ht) - g2(t, ts - ht)) / (2 * ht);
      const double g3p = (g2(t + ht, ts + ht) - g2(t + ht, ts - ht)) / (2 * ht);
      const double g3m = (g2(t - ht, ts + ht) - g2(t - ht, ts - ht)) / (2 * ht);
      g3max = std::max(g3max, std::abs(g3));
      dg3max = std::max(dg3max, std::abs((g3p - g3m) / (2 * ht)));
    }
    const double k2 = curvature_coeffs(t, body).kappa2;
    const double dk2 = dtheta_kappa2(t, body);
    c1 = std::min(c1, k2 - lam / 6.0 * g3max);
    c2 = std::max(c2, k2 + lam / 6.0 * g3max);
    c3 = std::min(c3, dk2 - lam / 6.0 * dg3max);
    c4 = std::max(c4, dk2 + lam / 6.0 * dg3max);
  }
  return {c1, c2, c3, c4};
}

} // namespace cgap::geometry
