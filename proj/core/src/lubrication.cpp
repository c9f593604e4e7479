#include "cgap/lubrication.hpp"

#include "cgap/jet.hpp"

namespace cgap::lub {

const char* to_string(Kind k) {
  switch (k) {
    case Kind::perp: return "perp";
    case Kind::parallel: return "parallel";
    case Kind::rotation: return "rotation";
  }
  return "?";
}

HermitePairings hermite_pairings() {
  using H = HermitePolys;
  HermitePairings p;
  p.p1p1 = quad::legendre<8>([](double r) { return H::d2P1(r) * H::d2P1(r); }, 0.0, 1.0);
  p.p1p2 = quad::legendre<8>([](double r) { return H::d2P1(r) * H::d2P2(r); }, 0.0, 1.0);
  p.p2p2 = quad::legendre<8>([](double r) { return H::d2P2(r) * H::d2P2(r); }, 0.0, 1.0);
  return p;
}

Motion Motion::of(Kind k) {
  Motion m;
  switch (k) {
    case Kind::perp: m.perp = 1.0; break;
    case Kind::parallel: m.parallel = 1.0; break;
    case Kind::rotation: m.rotation = 1.0; break;
  }
  return m;
}

double CStar::of(Kind k) const {
  switch (k) {
    case Kind::perp: return perp;
    case Kind::parallel: return parallel;
    case Kind::rotation: return rotation;
  }
  return 0.0;
}

GapContext gap_context(double theta, double dist, const ChannelBody& body) {
  if (!(dist > 0.0)) throw DomainError("gap distance must be positive");
  GapContext c;
  c.body = body;
  c.shape = geometry::gap_shape(theta, body);
  c.dist = dist;
  c.lam = body.lambda_star;
  return c;
}

GapContext gap_context(const Pose& pose, const ChannelBody& body) {
  const geometry::GapFrame f = geometry::frame(pose, body);
  return gap_context(f.theta, f.dist, body);
}

double c_star(Kind k, const GapContext& ctx, const quad::Options& opt) {
  const Motion m = Motion::of(k);
  auto num = [&](double t) {
    double A, B;
    boundary_trace(m, ctx.shape, t, A, B);
    const double g = ctx.g(t);
    return (12.0 * A - 6.0 * g * B) / (g * g * g);
  };
  auto den = [&](double t) {
    const double g = ctx.g(t);
    return 12.0 / (g * g * g);
  };
  const double n = quad::gap_fold(num, ctx.dist, ctx.lam, opt).value;
  const double d = quad::gap_fold(den, ctx.dist, ctx.lam, opt).value;
  return n / d;
}

double c_star(Kind k, const Pose& pose, const ChannelBody& body) {
  return c_star(k, gap_context(pose, body));
}

CStar c_star_all(const GapContext& ctx, const quad::Options& opt) {
  return {c_star(Kind::perp, ctx, opt), c_star(Kind::parallel, ctx, opt),
          c_star(Kind::rotation, ctx, opt)};
}

double optimality_residual(Kind k, const GapContext& ctx, double c) {
  const Motion m = Motion::of(k);
  const double sd = std::sqrt(ctx.dist);
  const double pm = std::asinh(ctx.lam / sd);
  auto f = [&](double u) {
    const double t = sd * std::sinh(u);
    double A, B;
    boundary_trace(m, ctx.shape, t, A, B);
    const double g = ctx.g(t);
    return (-12.0 * (A - c) + 6.0 * g * B) / (g * g * g) * sd * std::cosh(u);
  };
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.slack = 1e3;
  const double v = quad::tanh_sinh(f, -pm, pm, opt);
  // The normalizer has kinks where f changes sign; modest accuracy suffices.
  quad::Options no;
  no.rel_tol = 1e-8;
  no.slack = 1e4;
  const double a = quad::integrate([&](double p) { return std::abs(f(p)); }, -pm, pm, no);
  return a > 0.0 ? std::abs(v) / a : 0.0;
}

double pairing_1d(const Motion& a, const Motion& b, const GapContext& ctx, const CStar& c,
                  const quad::Options& opt) {
  const double ca = c.of(a), cb = c.of(b);
  auto f = [&](double t) {
    double Aa, Ba, Ab, Bb;
    boundary_trace(a, ctx.shape, t, Aa, Ba);
    boundary_trace(b, ctx.shape, t, Ab, Bb);
    Aa -= ca;
    Ab -= cb;
    const double g = ctx.g(t);
    return (12.0 * Aa * Ab - 6.0 * g * (Aa * Bb + Ab * Ba) + 4.0 * g * g * Ba * Bb) / (g * g * g);
  };
  return quad::gap_fold(f, ctx.dist, ctx.lam, opt).value;
}

double pairing_2d(const Motion& a, const Motion& b, const GapContext& ctx, const CStar& c,
                  const quad::Options& opt) {
  const double ca = c.of(a), cb = c.of(b);
  auto column = [&](double t) {
    auto f = [&](double y) {
      const Jet2 T = Jet2::var(t, 0), Y = Jet2::var(y, 1);
      return psi_opt(a, ctx, ca, T, Y).h[2] * psi_opt(b, ctx, cb, T, Y).h[2];
    };
    // The integrand is a quadratic polynomial in y: 8-point Gauss-Legendre
    // is exact, where an adaptive rule would chase roundoff.
    return quad::legendre<8>(f, 0.0, ctx.g(t));
  };
  return quad::gap_fold(column, ctx.dist, ctx.lam, opt).value;
}

double gap_dissipation(const GapContext& ctx) {
  const Motion m = Motion::of(Kind::perp);
  CStar c;
  c.perp = c_star(Kind::perp, ctx);
  return pairing_1d(m, m, ctx, c, tight());
}

double gap_dissipation(const Pose& pose, const ChannelBody& body) {
  return gap_dissipation(gap_context(pose, body));
}

double hessian_budget(const Motion& m, const GapContext& ctx, const CStar& c) {
  const double cm = c.of(m);
  auto column = [&](double t) {
    const double g = ctx.g(t);
    auto f = [&](double r) {
      const Jet2 T = Jet2::var(t, 0), X = Jet2::var(r * g, 1);
      const Jet2 p = psi_opt(m, ctx, cm, T, X);
      return p.h[0] * p.h[0] + 2.0 * p.h[1] * p.h[1];
    };
    return g * quad::legendre<8>(f, 0.0, 1.0);
  };
  return quad::gap_fold(column, ctx.dist, ctx.lam, tight()).value;
}

} // namespace cgap::lub
