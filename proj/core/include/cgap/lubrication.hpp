#pragma once

#include <string>

#include "cgap/geometry.hpp"
#include "cgap/quadrature.hpp"

namespace cgap::lub {

using geometry::ChannelBody;
using geometry::GapShape;
using geometry::Pose;

enum class Kind { perp, parallel, rotation };
const char* to_string(Kind k);

// Default tolerance for the one-dimensional gap integrals.
inline quad::Options tight() {
  quad::Options o;
  o.rel_tol = 1e-12;
  o.slack = 1e3;
  return o;
}

// Cubic interpolation polynomials across the gap, r in [0,1] from wall to body.
struct HermitePolys {
  static double P1(double r) { return r * r * (3.0 - 2.0 * r); }
  static double dP1(double r) { return 6.0 * r * (1.0 - r); }
  static double d2P1(double r) { return 6.0 - 12.0 * r; }
  static double d3P1(double) { return -12.0; }
  static double P2(double r) { return r * r * (r - 1.0); }
  static double dP2(double r) { return r * (3.0 * r - 2.0); }
  static double d2P2(double r) { return 6.0 * r - 2.0; }
  static double d3P2(double) { return 6.0; }
};

struct HermitePairings {
  double p1p1;  // integral of |P1''|^2
  double p1p2;  // integral of P1'' P2''
  double p2p2;  // integral of |P2''|^2
};
// Pairings by Gauss-Legendre quadrature on [0,1].
HermitePairings hermite_pairings();

// Rigid boundary motion as a combination of the three elementary kinds.
struct Motion {
  double perp = 0.0;
  double parallel = 0.0;
  double rotation = 0.0;
  static Motion of(Kind k);
};

// Lower-wall gap at angle theta and distance dist.
struct GapContext {
  ChannelBody body;
  GapShape shape;
  double dist = 0.0;
  double lam = 0.0;  // integration half-length, lambda_star by default

  double g(double tau) const { return dist + shape.rise(tau); }
};
GapContext gap_context(double theta, double dist, const ChannelBody& body);
GapContext gap_context(const Pose& pose, const ChannelBody& body);

// Boundary trace of the rigid stream function on the body, psi_*, and its
// vertical derivative, as functions of tau (stream functions vanish at the
// contact point).
template <class T>
void boundary_trace(const Motion& m, const GapShape& s, const T& tau, T& A, T& B) {
  const T d = s.rise(tau);
  A = m.perp * tau - m.parallel * d + m.rotation * (0.5 * tau * tau + 0.5 * d * d);
  B = T(-m.parallel) + m.rotation * d;
}

struct CStar {
  double perp = 0.0;
  double parallel = 0.0;
  double rotation = 0.0;
  double of(Kind k) const;
  double of(const Motion& m) const { return m.perp * perp + m.parallel * parallel + m.rotation * rotation; }
};

// Constant fixing the mean-free condition on the third vertical derivative
// of psi_opt at the wall.
double c_star(Kind k, const GapContext& ctx, const quad::Options& opt = tight());
double c_star(Kind k, const Pose& pose, const ChannelBody& body);
CStar c_star_all(const GapContext& ctx, const quad::Options& opt = tight());

// Integral of d222 psi_opt at the wall over the gap, normalized by the
// integral of its absolute value; evaluated with tanh-sinh, independently
// of the rule used for c_star.
double optimality_residual(Kind k, const GapContext& ctx, double c);

// Energy pairing of the vertical shear of two gap fields, reduced to 1D:
// integral of d22 psi_i d22 psi_j over the gap window.
double pairing_1d(const Motion& a, const Motion& b, const GapContext& ctx, const CStar& c,
                  const quad::Options& opt = {});
// Same pairing by nested 2D quadrature in (x1, x2).
double pairing_2d(const Motion& a, const Motion& b, const GapContext& ctx, const CStar& c,
                  const quad::Options& opt = {});

// Integral of |d22 psi_opt^perp|^2 over the gap window.
double gap_dissipation(const GapContext& ctx);
double gap_dissipation(const Pose& pose, const ChannelBody& body);

// Integral over the gap window of |hess psi_opt|^2 - |d22 psi_opt|^2.
double hessian_budget(const Motion& m, const GapContext& ctx, const CStar& c);

// psi_opt in the gap, as a function of tau = x1 - x1c and the height
// y = x2 + L above the wall (kept separate to avoid cancellation in thin gaps).
template <class T>
T psi_opt(const Motion& m, const GapContext& ctx, double c, const T& tau, const T& y) {
  T A, B;
  boundary_trace(m, ctx.shape, tau, A, B);
  const T g = ctx.dist + ctx.shape.rise(tau);
  const T r = y / g;
  const T P1 = r * r * (3.0 - 2.0 * r);
  const T P2 = r * r * (r - 1.0);
  return (A - c) * P1 + g * B * P2;
}

} // namespace cgap::lub
