#include "cgap/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "cgap/cutoff.hpp"
#include "cgap/errors.hpp"

namespace cgap::res {

namespace {

using geometry::kPi;

struct Rule {
  std::vector<double> x, w;  // on [0, 1]
};

const Rule& gl8() {
  static const Rule r = [] {
    using G = boost::math::quadrature::gauss<double, 8>;
    Rule q;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      q.x.push_back(0.5 * (1.0 - a[i]));
      q.w.push_back(0.5 * w[i]);
      q.x.push_back(0.5 * (1.0 + a[i]));
      q.w.push_back(0.5 * w[i]);
    }
    return q;
  }();
  return r;
}

Jet2 jet_of(const std::array<double, 4>& p, int k) {
  Jet2 j(p[0]);
  j.d[k] = p[1];
  j.h[k == 0 ? 0 : 2] = p[2];
  return j;
}

template <class F>
void panels(double a, double b, int n, F&& f) {
  const Rule& r = gl8();
  const double w = (b - a) / n;
  for (int p = 0; p < n; ++p) {
    const double lo = a + p * w;
    for (std::size_t i = 0; i < r.x.size(); ++i) f(lo + w * r.x[i], w * r.w[i]);
  }
}

std::vector<double> sorted_breaks(std::vector<double> b, double lo, double hi) {
  b.push_back(lo);
  b.push_back(hi);
  std::vector<double> out;
  for (double v : b)
    if (v >= lo && v <= hi) out.push_back(v);
  std::sort(out.begin(), out.end());
  std::vector<double> u;
  for (double v : out)
    if (u.empty() || v - u.back() > 1e-12) u.push_back(v);
  u.back() = hi;
  return u;
}

// Segment [a, b] split at the given interior breaks, panels spread by length.
template <class F>
void segment(double a, double b, const std::vector<double>& extra, int n, F&& f) {
  if (!(b > a)) return;
  const auto br = sorted_breaks(extra, a, b);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double len = br[i + 1] - br[i];
    const int k = std::max(1, static_cast<int>(std::ceil(n * len / (b - a))));
    panels(br[i], br[i + 1], k, f);
  }
}

} // namespace

TestField::TestField(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend)
    : body_(body), blend_(blend), h_(lower_pose.h) {
  const double theta = geometry::reduce_angle(lower_pose.theta);
  q_ = geometry::quad_coeffs(theta, body.e);
  const geometry::Point p = geometry::contact_point(theta, body);
  const double dist = h_ + p.x2 + body.L;
  gap_ = lub::gap_context(theta, dist, body);
  c_ = lub::c_star_all(gap_);
}

double TestField::y_lower(double x1) const {
  const double tau = x1 - x1c();
  if (std::abs(tau) <= 2.0 * gap_.lam) return gap_.g(tau);
  return h_ + body_.L + geometry::graph_lower_t(q_, body_.e, x1);
}

double TestField::y_upper(double x1) const {
  return h_ + body_.L + geometry::graph_upper_t(q_, body_.e, x1);
}

bool TestField::in_fluid(double x1, double y) const {
  if (y < 0.0 || y > 2.0 * body_.L) return false;
  const double Z = y - body_.L - h_;
  return q_.A * x1 * x1 + q_.B * x1 * Z + q_.C * Z * Z >= 1.0;
}

std::array<Jet2, 5> TestField::eval_raw(double x1, double y) const {
  const Jet2 X = Jet2::var(x1, 0), Y = Jet2::var(y, 1);
  const double tau0 = x1 - x1c();
  const Jet2 tau = X - x1c();
  const double lam = gap_.lam;
  const bool strip = std::abs(tau0) < 2.0 * lam && y < y_lower(x1);
  const Motion kinds[3] = {Motion::of(lub::Kind::perp), Motion::of(lub::Kind::parallel),
                           Motion::of(lub::Kind::rotation)};
  std::array<Jet2, 5> opt, out;
  if (strip) {
    for (int k = 0; k < 3; ++k) opt[k] = lub::psi_opt(kinds[k], gap_, 0.0, tau, Y);
    const Jet2 r = Y / (gap_.dist + gap_.shape.rise(tau));
    opt[3] = -(r * r * (3.0 - 2.0 * r));
    opt[4] = opt[3];
    if (std::abs(tau0) <= lam) return opt;
  }

  const double L = body_.L;
  const Jet2 dw = Y * (2.0 * L - Y) / (2.0 * L);
  const Jet2 Z = Y - (L + h_);
  const Jet2 Q = q_.A * X * X + q_.B * X * Z + q_.C * Z * Z;
  // First-order distance to the body: (sqrt(Q) - 1) / |grad sqrt(Q)|.
  const Jet2 q1 = 2.0 * q_.A * X + q_.B * Z, q2 = q_.B * X + 2.0 * q_.C * Z;
  const Jet2 db = 2.0 * (Q - sqrt(Q)) / sqrt(q1 * q1 + q2 * q2);
  Jet2 cut = jet_of(plateau(x1, blend_.x_inner, blend_.x_outer), 0);
  if (blend_.body_outer > 0.0) {
    const auto rc = step_down(db.v, blend_.body_inner, blend_.body_outer);
    cut = cut * db.chain(rc[0], rc[1], rc[2]);
  }
  auto outer = [&](double sigma) {
    const Jet2 sw = sigma * dw;
    const Jet2 s = sw / (sw + db);
    return s * s * (3.0 - 2.0 * s) * cut;
  };
  const Jet2 phi_a = outer(blend_.outer_scale);
  const Jet2 phi_b = blend_.outer_scale_rot == blend_.outer_scale ? phi_a : outer(blend_.outer_scale_rot);

  const Jet2 Yc = Y - gap_.dist;
  out[0] = phi_a * tau;
  out[1] = -(phi_b * Yc);
  out[2] = phi_b * (0.5 * (tau * tau + Yc * Yc));
  out[3] = -phi_a;
  out[4] = -phi_b;

  if (strip) {
    const Jet2 z = jet_of(plateau(tau0, lam, 2.0 * lam), 0);
    for (int k = 0; k < 5; ++k) out[k] = z * opt[k] + (1.0 - z) * out[k];
  }
  return out;
}

std::array<Jet2, 3> TestField::eval(double x1, double y) const {
  const auto r = eval_raw(x1, y);
  return {r[0] + c_.perp * r[3], r[1] + c_.parallel * r[4], r[2] + c_.rotation * r[4]};
}

Jet2 TestField::psi(const Motion& m, double x1, double y) const {
  const auto j = eval(x1, y);
  return m.perp * j[0] + m.parallel * j[1] + m.rotation * j[2];
}

std::array<double, 2> TestField::velocity(const Motion& m, double x1, double x2) const {
  const Jet2 p = psi(m, x1, x2 + body_.L);
  return {-p.d[1], p.d[0]};
}

void for_each_node(const TestField& tf, const Resolution& res,
                   const std::function<void(double, double, double)>& f, double x_extent) {
  const double X = std::max(tf.blend().x_outer, x_extent);
  const double xe = tf.halfwidth(), xc = tf.x1c(), lam = tf.gap().lam;
  const double L = tf.body().L, eps0 = flow::ExtensionField::eps0;
  const double Xi = tf.blend().x_inner;
  const auto br = sorted_breaks({-Xi, Xi, -3.0, 3.0, -2.0, 2.0, -xe, xe, xc - lam, xc + lam, xc - 2.0 * lam,
                                 xc + 2.0 * lam},
                                -X, X);
  const std::vector<double> ybr_lo = {0.5 * eps0, eps0};
  const std::vector<double> ybr_hi = {2.0 * L - eps0, 2.0 * L - 0.5 * eps0};
  const std::vector<double> ybr_full = {0.5 * eps0, eps0, 2.0 * L - eps0, 2.0 * L - 0.5 * eps0, tf.h() + L};
  const double sd = std::sqrt(tf.dist());

  auto column = [&](double x1, double wx) {
    if (std::abs(x1) < xe) {
      const double yl = tf.y_lower(x1), yu = tf.y_upper(x1);
      if (std::abs(x1 - xc) <= lam) {
        // Gap core: integrand polynomial in y / g times forcing that is smooth
        // once the wall transition layer is split off.
        segment(0.0, yl, ybr_lo, yl < eps0 ? 1 : res.y, [&](double y, double wy) { f(x1, y, wx * wy); });
      } else {
        segment(0.0, yl, ybr_lo, res.y, [&](double y, double wy) { f(x1, y, wx * wy); });
      }
      segment(yu, 2.0 * L, ybr_hi, res.y, [&](double y, double wy) { f(x1, y, wx * wy); });
    } else {
      segment(0.0, 2.0 * L, ybr_full, 2 * res.y, [&](double y, double wy) { f(x1, y, wx * wy); });
    }
  };

  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i], b = br[i + 1], mid = 0.5 * (a + b);
    const bool inside = std::abs(mid) < xe;
    if (std::abs(a - (xc - lam)) < 1e-12 && std::abs(b - (xc + lam)) < 1e-12) {
      const double ua = std::asinh((a - xc) / sd), ub = std::asinh((b - xc) / sd);
      panels(ua, ub, res.core, [&](double u, double w) { column(xc + sd * std::sinh(u), w * sd * std::cosh(u)); });
    } else if (inside && std::abs(b - xe) < 1e-12) {
      panels(0.0, 1.0, res.side, [&](double t, double w) { column(b - (b - a) * t * t, w * 2.0 * (b - a) * t); });
    } else if (inside && std::abs(a + xe) < 1e-12) {
      panels(0.0, 1.0, res.side, [&](double t, double w) { column(a + (b - a) * t * t, w * 2.0 * (b - a) * t); });
    } else {
      const bool blendp = std::abs(mid - xc) < 2.0 * lam;
      const int n = blendp ? res.blend : (inside ? res.side : res.outer);
      panels(a, b, n, column);
    }
  }
}

namespace {

struct ForcingEval {
  flow::ExtensionField field;
  bool mirrored;
  // Linear and quadratic parts of g-hat in the lower-frame coordinates.
  void at(double x1, double x2, double gl[2], double gn[2]) const {
    if (!mirrored) {
      const auto s = field.eval(x1, x2);
      gl[0] = s.glin1, gl[1] = s.glin2, gn[0] = s.gnl1, gn[1] = s.gnl2;
    } else {
      const auto s = field.eval(x1, -x2);
      gl[0] = s.glin1, gl[1] = -s.glin2, gn[0] = s.gnl1, gn[1] = -s.gnl2;
    }
  }
};

} // namespace

RawPairings raw_pairings(const TestField& tf, const Resolution& res, bool fdirect, bool fmirror) {
  RawPairings P;
  const double L = tf.body().L;
  const ForcingEval fd{flow::ExtensionField(L, 1.0, tf.h()), false};
  const ForcingEval fm[3] = {{flow::ExtensionField(L, 1.0, -tf.h(), chi_nodes[0]), true},
                             {flow::ExtensionField(L, 1.0, -tf.h(), chi_nodes[1]), true},
                             {flow::ExtensionField(L, 1.0, -tf.h(), chi_nodes[2]), true}};
  for_each_node(tf, res, [&](double x1, double y, double w) {
    const auto j = tf.eval_raw(x1, y);
    double a[5], b[5], c[5], d[5], v1[5], v2[5];
    for (int k = 0; k < 5; ++k) {
      a[k] = j[k].h[0], b[k] = j[k].h[1], c[k] = j[k].h[2];
      d[k] = a[k] - c[k];
      v1[k] = -j[k].d[1], v2[k] = j[k].d[0];
    }
    for (int k = 0; k < 5; ++k)
      for (int l = k; l < 5; ++l) {
        P.D[k][l] += w * (4.0 * b[k] * b[l] + d[k] * d[l]);
        P.G[k][l] += w * (a[k] * a[l] + 2.0 * b[k] * b[l] + c[k] * c[l]);
        P.M[k][l] += w * (v1[k] * v1[l] + v2[k] * v2[l]);
      }
    const double x2 = y - L;
    double gl[2], gn[2];
    if (fdirect) {
      fd.at(x1, x2, gl, gn);
      for (int k = 0; k < 5; ++k) {
        P.F1[k] += w * (gl[0] * v1[k] + gl[1] * v2[k]);
        P.F2[k] += w * (gn[0] * v1[k] + gn[1] * v2[k]);
      }
    }
    if (fmirror)
      for (int q = 0; q < 3; ++q) {
        fm[q].at(x1, x2, gl, gn);
        for (int k = 0; k < 5; ++k) {
          P.F1m[q][k] += w * (gl[0] * v1[k] + gl[1] * v2[k]);
          P.F2m[q][k] += w * (gn[0] * v1[k] + gn[1] * v2[k]);
        }
      }
  });
  for (int k = 0; k < 5; ++k)
    for (int l = 0; l < k; ++l) {
      P.D[k][l] = P.D[l][k];
      P.G[k][l] = P.G[l][k];
      P.M[k][l] = P.M[l][k];
    }
  return P;
}

lub::CStar optimal_constants(const RawPairings& p) {
  return {-p.D[0][3] / p.D[3][3], -p.D[1][4] / p.D[4][4], -p.D[2][4] / p.D[4][4]};
}

Pairings reduce(const RawPairings& p, const lub::CStar& cs, int source) {
  const double c[3] = {cs.perp, cs.parallel, cs.rotation};
  const int x[3] = {3, 4, 4};  // c-derivative field of each kind
  Pairings r;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      const int a = x[k], b = x[l];
      r.D[k][l] = p.D[k][l] + c[k] * p.D[a][l] + c[l] * p.D[k][b] + c[k] * c[l] * p.D[a][b];
      r.G[k][l] = p.G[k][l] + c[k] * p.G[a][l] + c[l] * p.G[k][b] + c[k] * c[l] * p.G[a][b];
      r.M[k][l] = p.M[k][l] + c[k] * p.M[a][l] + c[l] * p.M[k][b] + c[k] * c[l] * p.M[a][b];
    }
  const double* f1 = source < 0 ? p.F1 : p.F1m[source];
  const double* f2 = source < 0 ? p.F2 : p.F2m[source];
  for (int k = 0; k < 3; ++k) {
    r.F1[k] = f1[k] + c[k] * f1[x[k]];
    r.F2[k] = f2[k] + c[k] * f2[x[k]];
  }
  return r;
}

namespace {

double bilinear(const double M[3][3], const double a[3], const double b[3]) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) s += a[k] * M[k][l] * b[l];
  return s;
}

struct LowerPair {
  LowerFrame direct;
  LowerFrame mirrored[3];  // same R, mirrored physical source at chi_nodes
};

LowerPair lower_both(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend,
                     const Resolution& res, bool fdirect, bool fmirror) {
  const TestField tf(lower_pose, body, blend);
  const RawPairings raw = raw_pairings(tf, res, fdirect, fmirror);
  const lub::CStar cs = blend.global_constants ? optimal_constants(raw) : tf.constants();
  const Pairings pp[4] = {reduce(raw, cs, -1), reduce(raw, cs, 0), reduce(raw, cs, 1), reduce(raw, cs, 2)};
  const double a[3] = {1.0, 0.0, 0.0};
  const double b[3] = {0.0, -tf.x2c(), 1.0};
  const double* basis[2] = {a, b};
  LowerPair out;
  LowerFrame* frames[4] = {&out.direct, &out.mirrored[0], &out.mirrored[1], &out.mirrored[2]};
  for (int q = 0; q < 4; ++q) {
    LowerFrame* f = frames[q];
    const Pairings& p = pp[q];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        f->Rhat[i][j] = bilinear(p.D, basis[i], basis[j]);
        f->Mhat[i][j] = bilinear(p.M, basis[i], basis[j]);
      }
    for (int i = 0; i < 2; ++i) {
      f->F1hat[i] = f->F2hat[i] = 0.0;
      for (int k = 0; k < 3; ++k) {
        f->F1hat[i] += basis[i][k] * p.F1[k];
        f->F2hat[i] += basis[i][k] * p.F2[k];
      }
    }
    f->x1c = tf.x1c();
    f->dist = tf.dist();
  }
  return out;
}

// Mirrored-source frame for branch weight c from the three chi_nodes frames.
LowerFrame mix_branches(const LowerFrame m[3], double c) {
  LowerFrame f = m[0];
  for (int i = 0; i < 2; ++i) {
    const double q1[3] = {m[0].F1hat[i], m[1].F1hat[i], m[2].F1hat[i]};
    const double q2[3] = {m[0].F2hat[i], m[1].F2hat[i], m[2].F2hat[i]};
    f.F1hat[i] = chi_interp(q1, c);
    f.F2hat[i] = chi_interp(q2, c);
  }
  return f;
}

// Generalized quantities in (h', theta') from lower-frame data.
void to_generalized(const LowerFrame& f, double lambda0, double R[2][2], double F[2]) {
  const double T[2][2] = {{1.0, f.x1c}, {0.0, 1.0}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) s += T[k][i] * f.Rhat[k][l] * T[l][j];
      R[i][j] = s;
    }
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (int k = 0; k < 2; ++k) s += T[k][i] * (lambda0 * f.F1hat[k] + lambda0 * lambda0 * f.F2hat[k]);
    F[i] = s;
  }
}

void check_spd(const double R[2][2]) {
  if (!(R[0][0] > 0.0) || !(R[0][0] * R[1][1] - R[0][1] * R[1][0] > 0.0))
    throw QuadratureError("resistance matrix is not positive definite (under-resolved quadrature)");
}

} // namespace

Pairings pairings(const TestField& tf, const Resolution& res, bool with_forcing) {
  return reduce(raw_pairings(tf, res, with_forcing, false), tf.constants());
}

double quadratic(const double M[3][3], const Motion& a, const Motion& b) {
  const double va[3] = {a.perp, a.parallel, a.rotation};
  const double vb[3] = {b.perp, b.parallel, b.rotation};
  return bilinear(M, va, vb);
}

LowerFrame lower_frame(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend,
                       const Resolution& res) {
  return lower_both(lower_pose, body, blend, res, true, false).direct;
}

double lower_weight(double h) { return 1.0 - smoothstep((h + 0.25) / 0.5)[0]; }

namespace {

ResistanceModel blend_frames(double lambda0, const LowerFrame* lo, const LowerFrame* up,
                             double wl, double wu) {
  ResistanceModel m;
  double Rl[2][2] = {}, Fl[2] = {}, Ru[2][2] = {}, Fu[2] = {};
  if (lo) to_generalized(*lo, lambda0, Rl, Fl);
  if (up) to_generalized(*up, lambda0, Ru, Fu);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m.R[i][j] = wl * Rl[i][j] + wu * Ru[i][j];
    m.F_pois[i] = wl * Fl[i] - wu * Fu[i];
  }
  const double nrm = std::hypot(std::hypot(m.R[0][0], m.R[1][1]), std::hypot(m.R[0][1], m.R[1][0]));
  m.asymmetry = std::abs(m.R[0][1] - m.R[1][0]) / nrm;
  const double off = 0.5 * (m.R[0][1] + m.R[1][0]);
  m.R[0][1] = m.R[1][0] = off;
  return m;
}

ResistanceModel raw_model(const Pose& pose, const ChannelBody& body, double lambda0, const BlendOptions& blend,
                          const Resolution& res) {
  const double wl = lower_weight(pose.h), wu = lower_weight(-pose.h);
  LowerFrame lo, up;
  if (wl > 0.0) lo = lower_both(pose, body, blend, res, lambda0 != 0.0, false).direct;
  if (wu > 0.0) {
    const LowerPair lp = lower_both(geometry::mirror(pose), body, blend, res, false, lambda0 != 0.0);
    up = mix_branches(lp.mirrored, flow::ExtensionField::chi(pose.h));
  }
  ResistanceModel m = blend_frames(lambda0, wl > 0.0 ? &lo : nullptr, wu > 0.0 ? &up : nullptr, wl, wu);
  m.dist = geometry::distance(pose, body).dist;
  return m;
}

} // namespace

ResistanceModel resistance_and_forcing(const Pose& pose, const ChannelBody& body, double lambda0,
                                       const BlendOptions& blend, const Resolution& res) {
  geometry::require_admissible(pose, body);
  ResistanceModel m = raw_model(pose, body, lambda0, blend, res);
  if (lambda0 != 0.0) {
    const ResistanceModel c = raw_model({0.0, 0.0}, body, lambda0, blend, res);
    for (int i = 0; i < 2; ++i) m.F_pois[i] -= c.F_pois[i];
  }
  check_spd(m.R);
  return m;
}

TraceNorms trace_norms(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend,
                       const Resolution& res) {
  const TestField tf(lower_pose, body, blend);
  const Pairings p = pairings(tf, res, false);
  TraceNorms t;
  t.perp = std::sqrt(p.G[0][0]);
  t.parallel = std::sqrt(p.G[1][1]);
  t.rotation = std::sqrt(p.G[2][2]);
  const Motion b{0.0, -tf.x2c(), 1.0};
  t.composed = std::sqrt(quadratic(p.G, b, b));
  return t;
}

// ---------------------------------------------------------------------------
// Table

namespace {

constexpr int kChannels = 22;
// 0..2: Raa d^1.5, Rab d^0.5, Rbb d^0.5; 3..6: F1 a,b  F2 a,b (direct);
// 7 + 4q .. 10 + 4q: the same for the mirrored source at chi_nodes[q];
// 19..21: Maa, Mab, Mbb.

double theta_node(int j, int n) { return -0.5 * kPi + kPi * j / n; }

double catmull(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * (2.0 * p1 + t * (-p0 + p2 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (-p0 + 3.0 * p1 - 3.0 * p2 + p3))));
}

} // namespace

std::string ResistanceTable::key() const {
  std::ostringstream s;
  s << std::setprecision(17) << "cgap-rtable-v3 e=" << body_.e << " L=" << body_.L << " lam=" << body_.lambda_star
    << " nd=" << opt_.n_dist << " nt=" << opt_.n_theta << " dmin=" << opt_.d_min << " dlin=" << opt_.d_lin << " sigma=" << opt_.blend.outer_scale << "," << opt_.blend.outer_scale_rot
    << " X1=" << opt_.blend.x_inner << " X2=" << opt_.blend.x_outer << " rb=" << opt_.blend.body_inner << "," << opt_.blend.body_outer
    << " gc=" << opt_.blend.global_constants << " res=" << opt_.res.core << ","
    << opt_.res.blend << "," << opt_.res.side << "," << opt_.res.outer << "," << opt_.res.y;
  return s.str();
}

ResistanceTable ResistanceTable::build(const ChannelBody& body, const TableOptions& opt, int jobs) {
  ResistanceTable t;
  t.body_ = body;
  t.opt_ = opt;
  t.d_max_ = body.L + 0.3 - body.e;
  t.values_.assign(kChannels, std::vector<std::vector<double>>(opt.n_dist, std::vector<double>(opt.n_theta, 0.0)));
  const double s0 = t.coord(opt.d_min), s1 = t.coord(t.d_max_);
  const int total = opt.n_dist * opt.n_theta;
  auto work = [&](int start, int stride) {
    for (int n = start; n < total; n += stride) {
      const int i = n / opt.n_theta, j = n % opt.n_theta;
      const double target = s0 + (s1 - s0) * i / (opt.n_dist - 1);
      double lo = opt.d_min, hi = t.d_max_;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        (t.coord(mid) < target ? lo : hi) = mid;
      }
      const double d = i == 0 ? opt.d_min : (i == opt.n_dist - 1 ? t.d_max_ : 0.5 * (lo + hi));
      const double th = theta_node(j, opt.n_theta);
      const geometry::Point p = geometry::contact_point(th, body);
      const Pose pose{d - body.L - p.x2, th};
      const LowerPair lp = lower_both(pose, body, opt.blend, opt.res, true, true);
      const LowerFrame& f = lp.direct;
      double v[kChannels] = {f.Rhat[0][0] * std::pow(d, 1.5), f.Rhat[0][1] * std::sqrt(d),
                             f.Rhat[1][1] * std::sqrt(d), f.F1hat[0], f.F1hat[1], f.F2hat[0], f.F2hat[1]};
      v[19] = f.Mhat[0][0], v[20] = f.Mhat[0][1], v[21] = f.Mhat[1][1];
      for (int q = 0; q < 3; ++q) {
        const LowerFrame& m = lp.mirrored[q];
        v[7 + 4 * q] = m.F1hat[0], v[8 + 4 * q] = m.F1hat[1];
        v[9 + 4 * q] = m.F2hat[0], v[10 + 4 * q] = m.F2hat[1];
      }
      for (int k = 0; k < kChannels; ++k) t.values_[k][i][j] = v[k];
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(work, w, jobs);
  work(0, jobs);
  for (auto& th : pool) th.join();
  return t;
}

bool ResistanceTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return false;
  out << key() << "\n" << std::setprecision(17);
  for (const auto& ch : values_)
    for (const auto& row : ch) {
      for (double v : row) out << v << ' ';
      out << "\n";
    }
  return static_cast<bool>(out);
}

bool ResistanceTable::load(const std::string& path, ResistanceTable& t) {
  std::ifstream in(path);
  if (!in) return false;
  std::string k;
  std::getline(in, k);
  if (k != t.key()) return false;
  t.values_.assign(kChannels,
                   std::vector<std::vector<double>>(t.opt_.n_dist, std::vector<double>(t.opt_.n_theta, 0.0)));
  for (auto& ch : t.values_)
    for (auto& row : ch)
      for (double& v : row)
        if (!(in >> v)) return false;
  return true;
}

bool ResistanceTable::load(const std::string& path, const ChannelBody& body, const TableOptions& opt,
                           ResistanceTable& out) {
  ResistanceTable t;
  t.body_ = body;
  t.opt_ = opt;
  t.d_max_ = body.L + 0.3 - body.e;
  if (!load(path, t)) return false;
  out = std::move(t);
  return true;
}

ResistanceTable ResistanceTable::cached(const std::string& path, const ChannelBody& body, const TableOptions& opt,
                                        int jobs) {
  ResistanceTable t;
  t.body_ = body;
  t.opt_ = opt;
  t.d_max_ = body.L + 0.3 - body.e;
  if (!path.empty() && load(path, t)) return t;
  t = build(body, opt, jobs);
  if (!path.empty()) {
    // Write then rename so concurrent readers never see a partial file.
    const std::string tmp = path + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    if (t.save(tmp)) {
      std::error_code ec;
      std::filesystem::rename(tmp, path, ec);
      if (ec) std::filesystem::remove(tmp, ec);
    }
  }
  return t;
}

std::string ResistanceTable::key_for(const ChannelBody& body, const TableOptions& opt) {
  ResistanceTable t;
  t.body_ = body;
  t.opt_ = opt;
  return t.key();
}

double ResistanceTable::coord(double d) const { return std::log(d) + d / opt_.d_lin; }

double ResistanceTable::interp(int k, double s, double theta) const {
  const int nd = opt_.n_dist, nt = opt_.n_theta;
  const double l0 = coord(opt_.d_min), l1 = coord(d_max_);
  double u = (std::clamp(s, l0, l1) - l0) / (l1 - l0) * (nd - 1);
  int i = std::min(static_cast<int>(u), nd - 2);
  const double tu = u - i;
  double v = (theta + 0.5 * kPi) / kPi * nt;
  v -= nt * std::floor(v / nt);
  int j = static_cast<int>(v);
  const double tv = v - j;
  const auto& g = values_[k];
  auto at = [&](int a, int b) {
    b = ((b % nt) + nt) % nt;
    if (a < 0) return 2.0 * g[0][b] - g[1][b];
    if (a >= nd) return 2.0 * g[nd - 1][b] - g[nd - 2][b];
    return g[a][b];
  };
  double col[4];
  for (int q = 0; q < 4; ++q) {
    const int b = j - 1 + q;
    col[q] = catmull(at(i - 1, b), at(i, b), at(i + 1, b), at(i + 2, b), tu);
  }
  return catmull(col[0], col[1], col[2], col[3], tv);
}

LowerFrame ResistanceTable::lower(double h, double theta) const {
  const geometry::Point p = geometry::contact_point(theta, body_);
  const double d = h + p.x2 + body_.L;
  if (!(d > 0.0)) throw DomainError("pose touches the wall");
  const double ld = coord(std::max(d, opt_.d_min));
  LowerFrame f;
  f.x1c = p.x1;
  f.dist = d;
  f.Rhat[0][0] = interp(0, ld, theta) / std::pow(d, 1.5);
  f.Rhat[0][1] = f.Rhat[1][0] = interp(1, ld, theta) / std::sqrt(d);
  f.Rhat[1][1] = interp(2, ld, theta) / std::sqrt(d);
  f.F1hat[0] = interp(3, ld, theta);
  f.F1hat[1] = interp(4, ld, theta);
  f.F2hat[0] = interp(5, ld, theta);
  f.F2hat[1] = interp(6, ld, theta);
  f.Mhat[0][0] = interp(19, ld, theta);
  f.Mhat[0][1] = f.Mhat[1][0] = interp(20, ld, theta);
  f.Mhat[1][1] = interp(21, ld, theta);
  return f;
}

ResistanceModel ResistanceTable::model(const Pose& pose, double lambda0) const {
  auto raw = [&](const Pose& ps) {
    const double wl = lower_weight(ps.h), wu = lower_weight(-ps.h);
    LowerFrame lo, up;
    if (wl > 0.0) lo = lower(ps.h, ps.theta);
    if (wu > 0.0) {
      LowerFrame m[3];
      m[0] = lower(-ps.h, -ps.theta);
      const double ld = coord(std::max(m[0].dist, opt_.d_min));
      for (int q = 0; q < 3; ++q) {
        if (q > 0) m[q] = m[0];
        m[q].F1hat[0] = interp(7 + 4 * q, ld, -ps.theta);
        m[q].F1hat[1] = interp(8 + 4 * q, ld, -ps.theta);
        m[q].F2hat[0] = interp(9 + 4 * q, ld, -ps.theta);
        m[q].F2hat[1] = interp(10 + 4 * q, ld, -ps.theta);
      }
      up = mix_branches(m, flow::ExtensionField::chi(ps.h));
    }
    ResistanceModel m = blend_frames(lambda0, wl > 0.0 ? &lo : nullptr, wu > 0.0 ? &up : nullptr, wl, wu);
    m.dist = geometry::distance(ps, body_).dist;
    return m;
  };
  ResistanceModel m = raw(pose);
  if (lambda0 != 0.0) {
    const ResistanceModel c = raw({0.0, 0.0});
    for (int i = 0; i < 2; ++i) m.F_pois[i] -= c.F_pois[i];
  }
  check_spd(m.R);
  return m;
}

std::string default_cache_path(const ChannelBody& body, const TableOptions& opt) {
  namespace fs = std::filesystem;
  fs::path dir;
  if (const char* c = std::getenv("CGAP_CACHE_DIR"); c && *c) dir = c;
  else if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) dir = fs::path(x) / "cgap";
  else if (const char* h = std::getenv("HOME"); h && *h) dir = fs::path(h) / ".cache" / "cgap";
  else return {};
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return {};
  // FNV-1a, stable across builds.
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : ResistanceTable::key_for(body, opt)) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char name[40];
  std::snprintf(name, sizeof name, "rtable-%016llx.txt", static_cast<unsigned long long>(hash));
  return (dir / name).string();
}

} // namespace cgap::res
