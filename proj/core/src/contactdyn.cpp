#include "cgap/contactdyn.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "cgap/asymptotics.hpp"
#include "cgap/cutoff.hpp"
#include "cgap/fit.hpp"
#include "cgap/lubrication.hpp"
#include "cgap/quadrature.hpp"

namespace cgap::dyn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Potential

PotentialSpec PotentialSpec::hooke(double r_h, double r_theta) {
  if (!(r_h > 0.0) || !(r_theta > 0.0)) throw DomainError("Hooke stiffnesses must be positive");
  PotentialSpec p;
  p.r_h = r_h;
  p.r_theta = r_theta;
  return p;
}

PotentialSpec PotentialSpec::user(std::function<double(double, double)> value,
                                  std::function<std::array<double, 2>(double, double)> gradient) {
  if (!value || !gradient) throw DomainError("user potential needs a value and a gradient");
  PotentialSpec p;
  p.user_value = std::move(value);
  p.user_gradient = std::move(gradient);
  return p;
}

double PotentialSpec::value(double h, double theta) const {
  if (user_value) return user_value(h, theta);
  return 0.5 * (r_h * h * h + r_theta * theta * theta);
}

std::array<double, 2> PotentialSpec::gradient(double h, double theta) const {
  if (user_gradient) return user_gradient(h, theta);
  return {r_h * h, r_theta * theta};
}

PotentialCheck check_potential(const PotentialSpec& p, const ChannelBody& body, double rho_bar, double varpi_bar,
                               double theta_max, int n) {
  PotentialCheck c;
  c.rho_bar = rho_bar >= 0.0 ? rho_bar : (p.is_hooke() ? std::min(p.r_h, p.r_theta) : 0.0);
  c.varpi_bar = varpi_bar >= 0.0 ? varpi_bar : (p.is_hooke() ? 2.0 : 0.0);
  c.H0 = p.value(0.0, 0.0);
  c.zero_at_origin = std::abs(c.H0) <= 1e-14;
  c.coercivity = c.structural = std::numeric_limits<double>::infinity();
  const double hmax = body.L - body.e;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double h = -hmax + 2.0 * hmax * i / (n - 1);
      const double th = -theta_max + 2.0 * theta_max * j / (n - 1);
      if (h == 0.0 && th == 0.0) continue;
      if (!geometry::admissible({h, th}, body)) continue;
      const double H = p.value(h, th);
      const auto g = p.gradient(h, th);
      c.coercivity = std::min(c.coercivity, H / (0.5 * (h * h + th * th)));
      if (H > 0.0) c.structural = std::min(c.structural, (h * g[0] + th * g[1]) / H);
    }
  const double slack = 1e-12;
  c.coercive = c.coercivity >= c.rho_bar * (1.0 - slack);
  c.structural_ok = c.structural >= c.varpi_bar * (1.0 - slack);
  return c;
}

Inertia Inertia::of(const ChannelBody& body) {
  const double m = geometry::kPi * body.e;
  return {m, m * (1.0 + body.e * body.e) / 4.0};
}

// ---------------------------------------------------------------------------
// Amplitude

namespace {

// I(kappa2) of the M_opt limit with the contact depth x2 supplied separately.
double mopt_coefficient(const asym::KappaProfile& k, double x2) {
  return 6.0 * k.g1 + 12.0 * x2 * k.g2 - 6.0 * x2 * k.g3;
}

} // namespace

Amplitude::Amplitude(const ChannelBody& body) : body_(body), maps_(body) {}

double Amplitude::F(double kappa2) const {
  const auto k = asym::kappa_profile(kappa2, body_);
  return (maps_.dK3(kappa2) * k.I_mopt - 12.0 * k.I[4][3]) / (6.0 * k.I[2][2]);
}

double Amplitude::G(double kappa2) const { return G_increment(maps_.kmin(), kappa2); }

double Amplitude::G_increment(double k0, double k1) const {
  if (k0 == k1) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return -gauss_kronrod<double, 31>::integrate([&](double k) { return F(k); }, k0, k1, 8, 1e-13);
}

double Amplitude::log_rate(double theta) const {
  const auto cv = geometry::curvature_coeffs(theta, body_);
  const double x2 = geometry::contact_point(geometry::reduce_angle(theta), body_).x2;
  const auto k = asym::kappa_profile(cv.kappa2, body_);
  const double dk2 = geometry::dtheta_kappa2(theta, body_);
  return -(cv.kappa3 * mopt_coefficient(k, x2) - 12.0 * dk2 * k.I[4][3]) / (6.0 * k.I[2][2]);
}

double Amplitude::closed_form(double theta, double theta_ref) const {
  const double k = geometry::curvature_coeffs(theta, body_).kappa2;
  const double k0 = geometry::curvature_coeffs(theta_ref, body_).kappa2;
  const double kmin = maps_.kmin(), kmax = maps_.kmax();
  return std::exp(G_increment(std::clamp(k0, kmin, kmax), std::clamp(k, kmin, kmax)));
}

AmplitudePath amplitude(const std::function<double(double)>& theta, const std::function<double(double)>& thetadot,
                        double t0, double t1, int samples, const ChannelBody& body, const ode::Tolerances& tol) {
  if (samples < 2 || !(t1 > t0)) throw DomainError("amplitude path needs t1 > t0 and at least two samples");
  const Amplitude amp(body);
  AmplitudePath p;
  const double th0 = theta(t0);
  ode::IntegratorOptions opt;
  opt.tol = tol;
  opt.dt_init = 1e-3 * (t1 - t0);
  ode::Integrator integ([&](double t, const ode::Vec&, ode::Vec& dy) { dy[0] = thetadot(t) * amp.log_rate(theta(t)); },
                        opt);
  ode::Vec y{0.0};
  double t = t0;
  p.a_min = 1e300;
  p.a_max = -1e300;
  for (int i = 0; i < samples; ++i) {
    const double ti = t0 + (t1 - t0) * i / (samples - 1);
    if (ti > t) integ.advance(t, y, ti);
    const double cf = amp.closed_form(theta(ti), th0);
    const double od = std::exp(y[0]);
    p.t.push_back(ti);
    p.closed.push_back(cf);
    p.ode.push_back(od);
    p.max_rel_diff = std::max(p.max_rel_diff, std::abs(cf - od) / std::abs(cf));
    p.a_min = std::min(p.a_min, cf);
    p.a_max = std::max(p.a_max, cf);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Modulation

ModCoefficient mod_coefficient(double theta, double thetadot, const ChannelBody& body, bool freeze_amplitude) {
  const Amplitude amp(body);
  const auto cv = geometry::curvature_coeffs(theta, body);
  const double x2 = geometry::contact_point(geometry::reduce_angle(theta), body).x2;
  const auto k = asym::kappa_profile(cv.kappa2, body);
  const double dk2 = geometry::dtheta_kappa2(theta, body);
  // a' from the closed form: d log a / dt = -theta' F(kappa2) d_theta kappa2.
  const double adot = freeze_amplitude ? 0.0 : -thetadot * amp.F(cv.kappa2) * dk2;
  ModCoefficient m;
  m.amplitude_term = 6.0 * adot * k.I[2][2];
  m.kappa3_term = thetadot * cv.kappa3 * mopt_coefficient(k, x2);
  m.i43_term = -12.0 * thetadot * dk2 * k.I[4][3];
  m.value = m.amplitude_term + m.kappa3_term + m.i43_term;
  m.scale = std::abs(m.amplitude_term) + std::abs(m.kappa3_term) + std::abs(m.i43_term);
  m.relative = m.scale > 0.0 ? std::abs(m.value) / m.scale : 0.0;
  return m;
}

double mod_at_distance(double theta, double thetadot, double dist, const ChannelBody& body, bool freeze_amplitude) {
  const lub::GapContext ctx = lub::gap_context(theta, dist, body);
  const lub::CStar c = lub::c_star_all(ctx);
  const auto opt = lub::tight();
  const double cp = c.perp;
  const double J22 = quad::gap_fold([&](double t) {
    const double g = ctx.g(t);
    return (t - cp) * (t - cp) / (g * g);
  }, ctx.dist, ctx.lam, opt).value;
  // Five-point difference in theta keeps the rise derivative smooth to ~1e-13.
  const double th = geometry::reduce_angle(theta), st = 1e-3;
  auto rise = [&](double a, double t) { return geometry::gap_rise(a, t, body); };
  quad::Options loose;
  loose.rel_tol = 1e-10;
  const double J43 = quad::gap_fold([&](double t) {
    const double g = ctx.g(t);
    const double dr = (8.0 * (rise(th + st, t) - rise(th - st, t)) - rise(th + 2 * st, t) + rise(th - 2 * st, t)) /
                      (12.0 * st);
    return dr * (t - cp) * (t - cp) / (g * g * g);
  }, ctx.dist, ctx.lam, loose).value;
  const lub::Motion perp{1.0, 0.0, 0.0};
  const lub::Motion comp{0.0, -ctx.shape.x2, 1.0};
  const double M = lub::pairing_1d(perp, comp, ctx, c, opt);
  const double adot = freeze_amplitude ? 0.0 : thetadot * Amplitude(body).log_rate(theta);
  return 6.0 * adot * J22 - 12.0 * thetadot * J43 + thetadot * M;
}

ModSweep mod_sweep(double theta, double thetadot, const std::vector<double>& dists, const ChannelBody& body,
                   bool freeze_amplitude) {
  ModSweep s;
  s.dist = dists;
  for (double d : dists) s.mod.push_back(mod_at_distance(theta, thetadot, d, body, freeze_amplitude));
  s.slope = fit::loglog_slope(s.dist, s.mod, *std::max_element(dists.begin(), dists.end())).slope;
  return s;
}

// ---------------------------------------------------------------------------
// Contact potential

ContactPotential contact_potential(const State& s, const ChannelBody& body, const res::LowerFrame& frame, double a,
                                   const Inertia& inertia) {
  const geometry::GapFrame gf = geometry::frame({s.h, s.theta}, body);
  const double sg = gf.wall == geometry::Wall::lower ? 1.0 : -1.0;
  const double hd = sg * s.hdot, td = sg * s.thetadot;
  const lub::GapContext ctx = lub::gap_context(Pose{gf.h, gf.theta}, body);
  const double cp = lub::c_star(lub::Kind::perp, ctx);
  ContactPotential p;
  p.dist = gf.dist;
  p.a = a;
  p.Pc0 = 6.0 * quad::gap_fold([&](double t) {
    const double g = ctx.g(t);
    return (t - cp) * (t - cp) / (g * g);
  }, ctx.dist, ctx.lam, lub::tight()).value;
  const double ahat = hd + frame.x1c * td;
  p.momentum = ahat * frame.Mhat[0][0] + td * frame.Mhat[0][1] + inertia.m * hd;
  p.Pc = a * p.Pc0 - a * p.momentum;
  return p;
}

ContactPotential contact_potential(const State& s, const ChannelBody& body, double a, const Inertia& inertia) {
  const geometry::GapFrame gf = geometry::frame({s.h, s.theta}, body);
  return contact_potential(s, body, res::lower_frame({gf.h, gf.theta}, body), a, inertia);
}

// ---------------------------------------------------------------------------
// Multiplier field

MultiplierField::MultiplierField(const Pose& pose, const ChannelBody& body, double dist_min, double rho_max)
    : pose_(pose), body_(body), q_(geometry::quad_coeffs(pose.theta, body.e)) {
  geometry::require_admissible(pose, body);
  const double d = geometry::distance(pose, body).dist;
  if (d < dist_min) throw DomainError("pose too close to the wall for the multiplier cutoff to fit");
  const double r = -geometry::contact_point(geometry::reduce_angle(pose.theta), body).x2;
  rho2_ = std::min(rho_max, 0.9 * d / r);
}

void MultiplierField::zeta(double x1, double x2, double& z, double dz[2], double d2z[2][2]) const {
  dz[0] = dz[1] = 0.0;
  d2z[0][0] = d2z[0][1] = d2z[1][0] = d2z[1][1] = 0.0;
  const double Z = x2 - pose_.h;
  const double Q = q_.A * x1 * x1 + q_.B * x1 * Z + q_.C * Z * Z;
  const double lo = 0.5 * rho2_, hi = rho2_;
  if (Q <= (1.0 + lo) * (1.0 + lo)) {
    z = 1.0;
    return;
  }
  if (Q >= (1.0 + hi) * (1.0 + hi)) {
    z = 0.0;
    return;
  }
  const double s = std::sqrt(Q);
  const double dQ[2] = {2.0 * q_.A * x1 + q_.B * Z, q_.B * x1 + 2.0 * q_.C * Z};
  const double d2Q[2][2] = {{2.0 * q_.A, q_.B}, {q_.B, 2.0 * q_.C}};
  const auto S = step_down(s - 1.0, lo, hi);
  z = S[0];
  double ds[2];
  for (int i = 0; i < 2; ++i) ds[i] = dQ[i] / (2.0 * s);
  for (int i = 0; i < 2; ++i) {
    dz[i] = S[1] * ds[i];
    for (int j = 0; j < 2; ++j) {
      const double d2s = d2Q[i][j] / (2.0 * s) - dQ[i] * dQ[j] / (4.0 * s * s * s);
      d2z[i][j] = S[2] * ds[i] * ds[j] + S[1] * d2s;
    }
  }
}

double MultiplierField::stream(double x1, double x2) const {
  double z, dz[2], d2z[2][2];
  zeta(x1, x2, z, dz, d2z);
  const double Z = x2 - pose_.h;
  return z * (pose_.h * x1 + 0.5 * pose_.theta * (x1 * x1 + Z * Z));
}

std::array<double, 2> MultiplierField::velocity(double x1, double x2) const {
  double z, dz[2], d2z[2][2];
  zeta(x1, x2, z, dz, d2z);
  const double h = pose_.h, th = pose_.theta, Z = x2 - h;
  const double b = h * x1 + 0.5 * th * (x1 * x1 + Z * Z);
  const double b1 = h + th * x1, b2 = th * Z;
  const double p1 = dz[0] * b + z * b1, p2 = dz[1] * b + z * b2;
  return {-p2, p1};
}

std::array<std::array<double, 2>, 2> MultiplierField::gradient(double x1, double x2) const {
  double z, dz[2], d2z[2][2];
  zeta(x1, x2, z, dz, d2z);
  const double h = pose_.h, th = pose_.theta, Z = x2 - h;
  const double b = h * x1 + 0.5 * th * (x1 * x1 + Z * Z);
  const double bd[2] = {h + th * x1, th * Z};
  const double bdd[2][2] = {{th, 0.0}, {0.0, th}};
  double p[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p[i][j] = d2z[i][j] * b + dz[i] * bd[j] + dz[j] * bd[i] + z * bdd[i][j];
  // w = (-psi_2, psi_1)
  return {{{-p[1][0], -p[1][1]}, {p[0][0], p[0][1]}}};
}

double MultiplierField::divergence(double x1, double x2) const {
  const double s = 1e-5;
  const double a = velocity(x1 + s, x2)[0] - velocity(x1 - s, x2)[0];
  const double b = velocity(x1, x2 + s)[1] - velocity(x1, x2 - s)[1];
  return (a + b) / (2.0 * s);
}

bool MultiplierField::in_fluid(double x1, double x2) const {
  return std::abs(x2) < body_.L && geometry::level(pose_.theta, x1, x2 - pose_.h, body_.e) > 0.0;
}

MultiplierField::Norms MultiplierField::norms(int panels) const {
  // Elliptic coordinates about the centre: x = c + s R(theta) (cos phi, e sin phi),
  // dA = e s ds dphi; the fluid support of w is 1 <= s <= 1 + rho2.
  using boost::math::quadrature::gauss;
  double sn, cs;
  geometry::sincos_exact(pose_.theta, sn, cs);
  const double e = body_.e;
  double l2 = 0.0, g2 = 0.0;
  const double smax = 1.0 + rho2_;
  const int nphi = 4 * panels;
  for (int ip = 0; ip < nphi; ++ip) {
    const double pa = 2.0 * geometry::kPi * ip / nphi, pb = 2.0 * geometry::kPi * (ip + 1) / nphi;
    for (int is = 0; is < panels; ++is) {
      const double sa = 1.0 + (smax - 1.0) * is / panels, sb = 1.0 + (smax - 1.0) * (is + 1) / panels;
      auto col = [&](double s) {
        return gauss<double, 8>::integrate([&](double phi) {
          const double u = s * std::cos(phi), v = s * e * std::sin(phi);
          const auto w = velocity(cs * u - sn * v, pose_.h + sn * u + cs * v);
          return e * s * (w[0] * w[0] + w[1] * w[1]);
        }, pa, pb);
      };
      auto colg = [&](double s) {
        return gauss<double, 8>::integrate([&](double phi) {
          const double u = s * std::cos(phi), v = s * e * std::sin(phi);
          const double x1 = cs * u - sn * v, x2 = pose_.h + sn * u + cs * v;
          const auto G = gradient(x1, x2);
          return e * s * (G[0][0] * G[0][0] + G[0][1] * G[0][1] + G[1][0] * G[1][0] + G[1][1] * G[1][1]);
        }, pa, pb);
      };
      l2 += gauss<double, 8>::integrate(col, sa, sb);
      g2 += gauss<double, 8>::integrate(colg, sa, sb);
    }
  }
  return {std::sqrt(l2), std::sqrt(g2)};
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

struct Stop {
  std::string status;
  std::string message;
};

double total_energy(const ode::Vec& y, const Inertia& in, const PotentialSpec& pot) {
  return 0.5 * (in.m * y[2] * y[2] + in.J * y[3] * y[3]) + pot.value(y[0], y[1]);
}

} // namespace

Trajectory simulate(const SimConfig& cfg, const res::ResistanceTable* table,
                    const std::function<void(const Sample&)>& on_sample) {
  if (!(cfg.t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(cfg.output_dt > 0.0)) throw DomainError("output stride must be positive");
  if (!(cfg.tol.rel > 0.0) || !(cfg.tol.abs > 0.0)) throw DomainError("tolerances must be positive");
  if (cfg.source == ResistanceSource::table && !table) throw DomainError("table resistance source needs a table");
  const ChannelBody& body = cfg.body;
  geometry::require_admissible({cfg.initial.h, cfg.initial.theta}, body);
  Inertia in = cfg.inertia;
  if (!(in.m > 0.0) || !(in.J > 0.0)) in = Inertia::of(body);

  Trajectory tr;
  res::ResistanceModel held;
  Pose held_at{1e300, 1e300};
  auto model = [&](const Pose& p) -> res::ResistanceModel {
    ++tr.model_evaluations;
    switch (cfg.source) {
      case ResistanceSource::table: return table->model(p, cfg.lambda0);
      case ResistanceSource::exact: return res::resistance_and_forcing(p, body, cfg.lambda0);
      case ResistanceSource::refresh:
        if (std::max(std::abs(p.h - held_at.h), std::abs(p.theta - held_at.theta)) > cfg.refresh_increment) {
          held = res::resistance_and_forcing(p, body, cfg.lambda0);
          held_at = p;
        } else {
          --tr.model_evaluations;
        }
        return held;
    }
    return held;
  };

  // y = (h, theta, h', theta', W) with W' = q'^T R q' - F . q'.
  auto rhs = [&](double, const ode::Vec& y, ode::Vec& dy) {
    const Pose p{y[0], y[1]};
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !geometry::admissible(p, body)) {
      std::fill(dy.begin(), dy.end(), kNaN);
      return;
    }
    res::ResistanceModel m;
    try {
      m = model(p);
    } catch (const AdmissibilityError&) {
      std::fill(dy.begin(), dy.end(), kNaN);
      return;
    } catch (const DomainError&) {
      std::fill(dy.begin(), dy.end(), kNaN);
      return;
    }
    const auto gH = cfg.potential.gradient(y[0], y[1]);
    const double q[2] = {y[2], y[3]};
    const double Rq[2] = {m.R[0][0] * q[0] + m.R[0][1] * q[1], m.R[1][0] * q[0] + m.R[1][1] * q[1]};
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = (-gH[0] - Rq[0] + m.F_pois[0]) / in.m;
    dy[3] = (-gH[1] - Rq[1] + m.F_pois[1]) / in.J;
    dy[4] = q[0] * Rq[0] + q[1] * Rq[1] - m.F_pois[0] * q[0] - m.F_pois[1] * q[1];
  };

  auto guard = [&](double, const ode::Vec& y0, const ode::Vec& y1) -> double {
    for (double v : y1)
      if (!std::isfinite(v)) return 0.25;
    if (!geometry::admissible({y1[0], y1[1]}, body)) return 0.25;
    const double d0 = geometry::distance({y0[0], y0[1]}, body).dist;
    const double d1 = geometry::distance({y1[0], y1[1]}, body).dist;
    const double rel = std::abs(d1 - d0) / d0;
    if (rel > cfg.max_dist_change) return 0.9 * cfg.max_dist_change / rel;
    return 1.0;
  };

  ode::IntegratorOptions opt;
  opt.tol = cfg.tol;
  opt.dt_init = std::min(1e-2, cfg.output_dt);
  ode::Integrator integ(rhs, opt, guard);

  const Amplitude amp(body);
  // log a accumulated along theta between samples: d log a / d theta = log_rate.
  double th_prev = cfg.initial.theta, log_a = 0.0;
  auto make_sample = [&](double t, const ode::Vec& y) {
    Sample s;
    s.s = {t, y[0], y[1], y[2], y[3]};
    s.e.Ekin = 0.5 * (in.m * y[2] * y[2] + in.J * y[3] * y[3]);
    s.e.Etot = s.e.Ekin + cfg.potential.value(y[0], y[1]);
    s.e.cross = in.m * y[0] * y[2] + in.J * y[1] * y[3];
    s.e.Eomega = s.e.Etot;
    s.e.dist = geometry::distance({y[0], y[1]}, body).dist;
    s.e.Pc = kNaN;
    s.e.a = kNaN;
    if (cfg.diagnostics) {
      if (y[1] != th_prev) {
        using boost::math::quadrature::gauss_kronrod;
        log_a += gauss_kronrod<double, 15>::integrate([&](double th) { return amp.log_rate(th); }, th_prev, y[1], 6,
                                                       1e-11);
        th_prev = y[1];
      }
      s.e.a = std::exp(log_a);
      const geometry::GapFrame gf = geometry::frame({y[0], y[1]}, body);
      const res::LowerFrame lf =
          table ? table->lower(gf.h, gf.theta) : res::lower_frame({gf.h, gf.theta}, body);
      s.e.Pc = contact_potential(s.s, body, lf, s.e.a, in).Pc;
    }
    return s;
  };

  ode::Vec y{cfg.initial.h, cfg.initial.theta, cfg.initial.hdot, cfg.initial.thetadot, 0.0};
  double t = cfg.initial.t;
  const double t_end = cfg.initial.t + cfg.t_end;
  tr.dist_min = geometry::distance({y[0], y[1]}, body).dist;

  auto emit = [&](double tt) {
    tr.samples.push_back(make_sample(tt, y));
    if (on_sample) on_sample(tr.samples.back());
  };

  auto hook = [&](double, const ode::Vec& y0, double, const ode::Vec& y1) {
    const double E0 = total_energy(y0, in, cfg.potential), E1 = total_energy(y1, in, cfg.potential);
    const double dW = y1[4] - y0[4];
    const double resid = std::abs(E1 - E0 + dW);
    const double scale = cfg.tol.abs + cfg.tol.rel * std::max({E0, E1, std::abs(dW)});
    tr.max_balance_ratio = std::max(tr.max_balance_ratio, resid / scale);
    tr.dist_min = std::min(tr.dist_min, geometry::distance({y1[0], y1[1]}, body).dist);
    if (std::abs(y1[1]) > cfg.theta_max)
      throw Stop{"theta_guard", "|theta| exceeded theta_max = " + std::to_string(cfg.theta_max)};
  };

  try {
    emit(t);
    int k = 0;
    while (t < t_end) {
      ++k;
      const double target = std::min(t_end, cfg.initial.t + k * cfg.output_dt);
      integ.advance(t, y, target, hook);
      emit(t);
    }
  } catch (const Stop& s) {
    tr.status = s.status;
    tr.message = s.message;
  } catch (const ode::StepSizeUnderflow& e) {
    tr.status = "underflow";
    tr.message = e.what();
  } catch (const QuadratureError& e) {
    tr.status = "non_spd";
    tr.message = e.what();
  } catch (const std::exception& e) {
    tr.status = "error";
    tr.message = e.what();
  }
  tr.stats = integ.stats();
  tr.omega = cfg.omega >= 0.0 ? cfg.omega : omega0(tr);
  apply_omega(tr, tr.omega);
  return tr;
}

bool sandwich_holds(const Trajectory& tr, double omega) {
  for (const auto& s : tr.samples) {
    const double Ew = s.e.Etot + omega * s.e.cross;
    if (Ew < 0.5 * s.e.Etot || Ew > 1.5 * s.e.Etot) return false;
  }
  return true;
}

double omega0(const Trajectory& tr, double cap) {
  if (sandwich_holds(tr, cap)) return cap;
  double lo = 0.0, hi = cap;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sandwich_holds(tr, mid) ? lo : hi) = mid;
  }
  return lo;
}

void apply_omega(Trajectory& tr, double omega) {
  tr.omega = omega;
  for (auto& s : tr.samples) s.e.Eomega = s.e.Etot + omega * s.e.cross;
}

DecayDiagnostics decay_diagnostics(const Trajectory& tr, bool require_fit) {
  const auto& S = tr.samples;
  if (S.size() < 5) throw DomainError("trajectory too short for decay diagnostics");
  DecayDiagnostics d;
  d.dist_min = tr.dist_min;
  d.sandwich = sandwich_holds(tr, tr.omega);
  const std::size_t tail = std::max<std::size_t>(1, S.size() / 10);
  std::vector<double> last;
  for (std::size_t i = S.size() - tail; i < S.size(); ++i) last.push_back(S[i].e.Etot);
  std::nth_element(last.begin(), last.begin() + last.size() / 2, last.end());
  d.E_floor = last[last.size() / 2];
  d.monotone = true;
  for (std::size_t i = 1; i < S.size(); ++i)
    if (S[i].e.Etot > S[i - 1].e.Etot * (1.0 + 1e-9) + 1e-300) d.monotone = false;
  std::vector<double> t, y, w;
  const double thresh = std::max(10.0 * d.E_floor, 1e-300);
  for (const auto& s : S)
    if (s.e.Etot > thresh) {
      t.push_back(s.s.t);
      y.push_back(std::log(s.e.Etot - d.E_floor));
      w.push_back(1.0);
    }
  d.fit_points = static_cast<int>(t.size());
  if (t.size() < 3) {
    if (require_fit) throw DomainError("decay fit is degenerate (fewer than three points above the floor)");
    d.beta_fit = kNaN;
    return d;
  }
  d.beta_fit = -fit::weighted_line(t, y, w).slope;
  return d;
}

} // namespace cgap::dyn
