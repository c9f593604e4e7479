#include "cgap/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "cgap/fit.hpp"

namespace cgap::asym {

double I_pq(int p, int q, double kappa2) {
  if (p < 0 || q < 1 || p >= 2 * q - 1) throw DomainError("I_pq diverges unless 0 <= p < 2q-1");
  if (!(kappa2 > 0.0)) throw DomainError("I_pq needs kappa2 > 0");
  if (p % 2 == 1) return 0.0;
  const double a = 0.5 * (p + 1);
  return std::pow(kappa2, -a) * std::beta(a, q - a);
}

IpqCheck I_pq_crosscheck(int p, int q, double kappa2) {
  IpqCheck c;
  c.beta = I_pq(p, q, kappa2);
  if (p % 2 == 1) return c;
  // Tail beyond T is below 2 T^(p-2q+1) / ((2q-p-1) kappa^q); choose T so
  // this sits at 1e-14 relative.
  const double k = 2.0 * q - p - 1.0;
  const double target = 1e-14 * c.beta;
  c.truncation = std::pow(target * k * std::pow(kappa2, q) / 2.0, -1.0 / k);
  c.tail_bound = 2.0 * std::pow(c.truncation, -k) / (k * std::pow(kappa2, q));
  const double sk = std::sqrt(kappa2);
  auto f = [&](double phi) {
    const double cp = std::cos(phi), t = std::tan(phi) / sk;
    return 2.0 * std::pow(t, p) * std::pow(cp, 2 * q) / (sk * cp * cp);
  };
  quad::Options opt;
  opt.rel_tol = 1e-14;
  opt.slack = 1e3;
  c.quadrature = quad::integrate(f, 0.0, std::atan(sk * c.truncation), opt);
  c.rel_diff = std::abs(c.quadrature - c.beta) / c.beta;
  return c;
}

double gap_integral(int p, int q, const lub::GapContext& ctx, const quad::Options& opt) {
  auto f = [&](double t) { return std::pow(t, p) / std::pow(ctx.g(t), q); };
  return quad::gap_fold(f, ctx.dist, ctx.lam, opt).value;
}

Exponent predicted_exponent(int p, int q) {
  if (p % 2 == 0) {
    if (p <= 2 * q - 2) return {0.5 * (p + 1) - q, false};
    return {0.0, true};
  }
  if (p <= 2 * q - 3) return {0.5 * (p + 2) - q, false};
  return {0.0, true};
}

std::vector<ExponentRow> exponent_suite(const ChannelBody& body, const std::vector<double>& thetas,
                                        const std::vector<int>& ps, const std::vector<int>& qs,
                                        const ExponentOptions& opt) {
  const std::vector<double> ds = fit::logspace(opt.d_lo, opt.d_hi, opt.per_decade);
  std::vector<ExponentRow> rows;
  for (double th : thetas) {
    std::vector<lub::GapContext> ctxs;
    for (double d : ds) ctxs.push_back(lub::gap_context(th, d, body));
    for (int q : qs) {
      for (int p : ps) {
        ExponentRow r;
        r.p = p;
        r.q = q;
        r.theta = th;
        r.predicted = predicted_exponent(p, q);
        std::vector<double> vals;
        bool all_zero = true;
        for (const auto& c : ctxs) {
          vals.push_back(gap_integral(p, q, c));
          if (vals.back() != 0.0) all_zero = false;
        }
        r.exact_zero = all_zero;
        if (all_zero) {
          r.fitted = std::numeric_limits<double>::quiet_NaN();
          r.pass = (p % 2 == 1);
        } else {
          r.fitted = fit::power_law_with_correction(ds, vals, opt.d_hi).exponent;
          r.plain_slope = fit::loglog_slope(ds, vals, opt.d_hi).slope;
          r.pass = r.predicted.bounded ? r.fitted >= -opt.tol
                                       : std::abs(r.fitted - r.predicted.value) <= opt.tol;
        }
        rows.push_back(r);
      }
    }
  }
  return rows;
}

KappaProfile kappa_profile(double kappa2, const ChannelBody& body, bool crosscheck) {
  const geometry::K2Maps maps(body);
  KappaProfile k;
  k.kappa2 = kappa2;
  k.x2 = maps.X2(kappa2);
  for (int p = 0; p < 8; ++p) {
    for (int q = 0; q < 5; ++q) {
      if (q >= 1 && p < 2 * q - 1) {
        k.I[p][q] = I_pq(p, q, kappa2);
        if (crosscheck) k.max_crosscheck = std::max(k.max_crosscheck, I_pq_crosscheck(p, q, kappa2).rel_diff);
      } else {
        k.I[p][q] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  const auto& I = k.I;
  for (int i = 1; i <= 3; ++i) k.K[i] = I[2 * i][i + 1];
  k.num_inf = I[4][4];
  k.den_inf = 12.0 * I[0][3];
  k.c_inf_perp = -36.0 * k.num_inf / k.den_inf;
  k.c_inf_parallel = 1.0 / 3.0;
  k.c_inf_rotation = I[2][3] / (2.0 * I[0][3]);
  const double cp = k.c_inf_perp, cl = k.c_inf_parallel;
  // Expansion of the odd parts to first order in kappa3; the rotation
  // constant drops out of G1 because the perp field is mean-free.
  k.g1 = -3.0 * I[6][4] - cp * I[2][3];
  k.g2 = I[4][3] - 3.0 * kappa2 * I[6][4] - kappa2 * cp * I[2][3] - 3.0 * cl * I[4][4] - cp * cl * I[0][3];
  k.g3 = -2.0 * I[4][3] - cp * I[0][2];
  k.I_mopt = 6.0 * k.g1 + 12.0 * k.x2 * k.g2 - 6.0 * k.x2 * k.g3;
  return k;
}

MOptDecomposition m_opt_decomposition(double theta, double dist, const ChannelBody& body) {
  const lub::GapContext ctx = lub::gap_context(theta, dist, body);
  MOptDecomposition m;
  m.c = lub::c_star_all(ctx);
  const double x2 = ctx.shape.x2, cp = m.c.perp, cr = m.c.rotation, cl = m.c.parallel;
  const auto opt = lub::tight();
  auto fold = [&](auto&& f) { return quad::gap_fold(f, ctx.dist, ctx.lam, opt).value; };
  m.G1 = fold([&](double t) {
    const double g = ctx.g(t);
    return (t - cp) * (t * t - 2.0 * cr) / (g * g * g);
  });
  m.G2 = fold([&](double t) {
    const double g = ctx.g(t);
    return x2 * (t - cp) * (ctx.shape.rise(t) + cl) / (g * g * g);
  });
  m.G3 = fold([&](double t) {
    const double g = ctx.g(t);
    return x2 * (t - cp) / (g * g);
  });
  const lub::Motion perp = lub::Motion::of(lub::Kind::perp);
  lub::Motion b;
  b.rotation = 1.0;
  b.parallel = -x2;
  m.M_direct = lub::pairing_2d(perp, b, ctx, m.c, opt);
  m.M_reduced = lub::pairing_1d(perp, b, ctx, m.c, opt);
  return m;
}

} // namespace cgap::asym
