#include "cgap/flowfield.hpp"

#include <algorithm>
#include <cmath>

#include "cgap/cutoff.hpp"
#include "cgap/quadrature.hpp"

namespace cgap::flow {

DimlessParams DimlessParams::from_lambda0(double e, double L, double lambda0, double m, double J) {
  DimlessParams p;
  p.e = e;
  p.L = L;
  p.lambda0 = lambda0;
  p.p0 = 2.0 * lambda0 / (L * L);
  p.m = m;
  p.J = J;
  return p;
}

DimlessParams nondimensionalize(const PhysicalParams& q) {
  for (double v : {q.mu, q.rho, q.d, q.delta, q.Lcal, q.Mcal, q.Jcal})
    if (!(v > 0.0)) throw DomainError("physical parameters must be strictly positive");
  if (!(q.P0 >= 0.0)) throw DomainError("pressure drop must be non-negative");
  if (!(q.delta < q.d)) throw DomainError("semi-minor axis must be smaller than the semi-major axis");
  if (!(q.Lcal > 2.0 * q.d)) throw DomainError("channel half-width must exceed twice the semi-major axis");
  DimlessParams p;
  p.e = q.delta / q.d;
  p.L = q.Lcal / q.d;
  p.p0 = q.P0 * q.rho * q.d * q.d * q.d / (q.mu * q.mu);
  p.lambda0 = 0.5 * p.p0 * p.L * p.L;
  p.m = q.Mcal / (q.rho * q.d * q.d);
  p.J = q.Jcal / (q.rho * q.d * q.d * q.d * q.d);
  p.energy_scale = q.rho / (q.mu * q.mu);
  return p;
}

Velocity poiseuille(double x2, const DimlessParams& p) {
  if (std::abs(x2) > p.L * (1.0 + 1e-14)) throw DomainError("ordinate outside the channel");
  return {p.lambda0 * (1.0 - x2 * x2 / (p.L * p.L)), 0.0};
}

ExtensionField::ExtensionField(double L, double lambda0, double h) : ExtensionField(L, lambda0, h, chi(h)) {}

ExtensionField::ExtensionField(double L, double lambda0, double h, double blend)
    : L_(L), lambda0_(lambda0), h_(h), c_(blend) {
  if (!(L > 2.0)) throw DomainError("channel half-width must exceed 2");
}

double ExtensionField::zeta1(double x1) const { return plateau(x1, 2.0, 3.0)[0]; }
double ExtensionField::zeta0_minus(double x2) const { return step_down(x2, L_ - eps0, L_ - 0.5 * eps0)[0]; }
double ExtensionField::zeta0_plus(double x2) const { return zeta0_minus(-x2); }
double ExtensionField::chi(double h) { return smoothstep((h - 0.25) / 0.25)[0]; }
double ExtensionField::dchi(double h) { return smoothstep((h - 0.25) / 0.25)[1] / 0.25; }

void ExtensionField::branch(double x1, double x2, bool upper, double D[4][4]) const {
  const double L = L_, lam = lambda0_;
  // Poiseuille stream function and derivatives in x2, shifted to vanish on one wall.
  const double wall = upper ? L : -L;
  double b[4];
  b[0] = -lam * (x2 - x2 * x2 * x2 / (3 * L * L)) + lam * (wall - wall * wall * wall / (3 * L * L));
  b[1] = -lam * (1.0 - x2 * x2 / (L * L));
  b[2] = 2.0 * lam * x2 / (L * L);
  b[3] = 2.0 * lam / (L * L);
  const auto z1 = plateau(x1, 2.0, 3.0);
  // zeta0 for the lower branch is a step in x2; the upper branch mirrors it.
  std::array<double, 4> z0;
  if (!upper) {
    z0 = step_down(x2, L - eps0, L - 0.5 * eps0);
  } else {
    const auto m = step_down(-x2, L - eps0, L - 0.5 * eps0);
    z0 = {m[0], -m[1], m[2], -m[3]};
  }
  // Z = 1 - zeta1 zeta0
  double Z[4][4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) Z[i][j] = -z1[i] * z0[j];
  Z[0][0] += 1.0;
  static const int C[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) {
      double v = 0.0;
      for (int k = 0; k <= j; ++k) v += C[j][k] * b[k] * Z[i][j - k];
      D[i][j] = v;
    }
}

ExtensionSample ExtensionField::eval(double x1, double x2) const {
  ExtensionSample s;
  const double c = c_, dc = dchi(h_);
  double Dm[4][4] = {}, Dp[4][4] = {}, D[4][4] = {};
  if (c < 1.0) branch(x1, x2, false, Dm);
  if (c > 0.0) branch(x1, x2, true, Dp);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) D[i][j] = c * Dp[i][j] + (1.0 - c) * Dm[i][j];
  s.s1 = -D[0][1];
  s.s2 = D[1][0];
  s.grad[0][0] = -D[1][1];
  s.grad[0][1] = -D[0][2];
  s.grad[1][0] = D[2][0];
  s.grad[1][1] = D[1][1];
  const double lap1 = -(D[2][1] + D[0][3]);
  const double lap2 = D[3][0] + D[1][2];
  const double p0 = 2.0 * lambda0_ / (L_ * L_);
  s.glin1 = p0 + lap1;
  s.glin2 = lap2;
  s.gnl1 = -(s.s1 * s.grad[0][0] + s.s2 * s.grad[0][1]);
  s.gnl2 = -(s.s1 * s.grad[1][0] + s.s2 * s.grad[1][1]);
  s.g1 = s.gnl1 + s.glin1;
  s.g2 = s.gnl2 + s.glin2;
  if (dc != 0.0) {
    if (c == 0.0) branch(x1, x2, true, Dp);
    if (c == 1.0) branch(x1, x2, false, Dm);
    s.fbar1 = -dc * (Dp[0][1] - Dm[0][1]);
    s.fbar2 = dc * (Dp[1][0] - Dm[1][0]);
  }
  return s;
}

double ExtensionField::stream(double x1, double x2) const {
  const double c = c_;
  double Dm[4][4] = {}, Dp[4][4] = {};
  if (c < 1.0) branch(x1, x2, false, Dm);
  if (c > 0.0) branch(x1, x2, true, Dp);
  return c * Dp[0][0] + (1.0 - c) * Dm[0][0];
}

double ExtensionField::div_residual(double x1, double x2, double h) const {
  const double a = eval(x1 + h, x2).s1 - eval(x1 - h, x2).s1;
  const double b = eval(x1, x2 + h).s2 - eval(x1, x2 - h).s2;
  return (a + b) / (2.0 * h);
}

double source_l2(const ExtensionField& f, int panels) {
  // Breakpoints at the cutoff transitions so every panel sees a smooth integrand.
  const double L = f.L(), e0 = ExtensionField::eps0;
  std::vector<double> xs = {-3, -2, 2, 3};
  std::vector<double> ys = {-L, -L + 0.5 * e0, -L + e0, L - e0, L - 0.5 * e0, L};
  auto refine = [panels](const std::vector<double>& b) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < b.size(); ++k)
      for (int i = 0; i < panels; ++i) out.push_back(b[k] + (b[k + 1] - b[k]) * i / panels);
    out.push_back(b.back());
    return out;
  };
  const auto X = refine(xs), Y = refine(ys);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < X.size(); ++i) {
    acc += quad::legendre<6>([&](double x1) {
      double col = 0.0;
      for (std::size_t j = 0; j + 1 < Y.size(); ++j)
        col += quad::legendre<6>([&](double x2) {
          const auto s = f.eval(x1, x2);
          return s.g1 * s.g1 + s.g2 * s.g2;
        }, Y[j], Y[j + 1]);
      return col;
    }, X[i], X[i + 1]);
  }
  // The outer box [-3,-2] u [2,3] already covers |x1| <= 3; g-hat vanishes beyond.
  return std::sqrt(acc);
}

double w1inf_norm(const ExtensionField& f, int n) {
  double m = 0.0;
  const double L = f.L();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x1 = -4.0 + 8.0 * i / (n - 1), x2 = -L + 2.0 * L * j / (n - 1);
      const auto s = f.eval(x1, x2);
      m = std::max({m, std::abs(s.s1), std::abs(s.s2), std::abs(s.grad[0][0]), std::abs(s.grad[0][1]),
                    std::abs(s.grad[1][0]), std::abs(s.grad[1][1])});
    }
  return m;
}

} // namespace cgap::flow
