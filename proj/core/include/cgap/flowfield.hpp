#pragma once

#include "cgap/errors.hpp"

namespace cgap::flow {

struct PhysicalParams {
  double mu = 1.0;     // viscosity
  double rho = 1.0;    // density
  double d = 1.0;      // semi-major axis
  double delta = 0.5;  // semi-minor axis
  double Lcal = 3.0;   // channel half-width
  double P0 = 0.0;     // pressure drop per unit length
  double Mcal = 1.0;   // body mass
  double Jcal = 1.0;   // moment of inertia
};

struct DimlessParams {
  double e = 0.5;
  double L = 3.0;
  double p0 = 0.0;
  double lambda0 = 0.0;  // p0 L^2 / 2
  double m = 1.0;
  double J = 1.0;
  double energy_scale = 1.0;  // rho / mu^2, converts physical energies
  static DimlessParams from_lambda0(double e, double L, double lambda0, double m, double J);
};

// Reference speed mu/(rho d) and length d.
DimlessParams nondimensionalize(const PhysicalParams& p);

struct Velocity {
  double v1 = 0.0;
  double v2 = 0.0;
};

Velocity poiseuille(double x2, const DimlessParams& p);

struct ExtensionSample {
  double s1 = 0.0, s2 = 0.0;
  // ds_i/dx_j as grad[i][j]
  double grad[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double g1 = 0.0, g2 = 0.0;        // source g-hat
  // Parts of g-hat linear (p0 e1 + lap s) and quadratic (-(s.grad)s) in lambda0.
  double glin1 = 0.0, glin2 = 0.0;
  double gnl1 = 0.0, gnl2 = 0.0;
  double fbar1 = 0.0, fbar2 = 0.0;  // d s / d h
};

// Solenoidal extension of the Poiseuille flow that vanishes near the body:
// stream function chi(h) b+ Z+ + (1 - chi(h)) b- Z-, with b the Poiseuille
// stream function shifted to vanish on the upper (+) or lower (-) wall and
// Z = 1 - zeta1(x1) zeta0(x2) switching it off in a box around the body.
class ExtensionField {
public:
  ExtensionField(double L, double lambda0, double h);
  // Same field with the branch weight chi(h) replaced by `blend`. The source
  // is a quadratic polynomial in this weight.
  ExtensionField(double L, double lambda0, double h, double blend);

  double L() const { return L_; }
  double lambda0() const { return lambda0_; }
  double h() const { return h_; }
  double blend() const { return c_; }
  static constexpr double eps0 = 0.25;

  ExtensionSample eval(double x1, double x2) const;
  // Stream function value only.
  double stream(double x1, double x2) const;
  // Central-difference divergence of s at x with step h.
  double div_residual(double x1, double x2, double step = 1e-4) const;

  // Cutoff profiles.
  double zeta1(double x1) const;
  double zeta0_minus(double x2) const;
  double zeta0_plus(double x2) const;
  static double chi(double h);
  static double dchi(double h);

private:
  double L_;
  double lambda0_;
  double h_;
  double c_;
  // Derivatives D[i][j] = d^(i+j) Psi / dx1^i dx2^j, i + j <= 3, of one branch.
  void branch(double x1, double x2, bool upper, double D[4][4]) const;
};

// L2 norm of g-hat over [-3,3] x [-L,L] by tensor Gauss-Legendre.
double source_l2(const ExtensionField& f, int panels = 24);
// Sup of |s| and |grad s| over a sample grid of the channel.
double w1inf_norm(const ExtensionField& f, int n = 81);

} // namespace cgap::flow
