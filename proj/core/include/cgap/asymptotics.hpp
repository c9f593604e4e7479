#pragma once

#include <array>
#include <vector>

#include "cgap/geometry.hpp"
#include "cgap/lubrication.hpp"

namespace cgap::asym {

using geometry::ChannelBody;

// I_{p,q}(kappa) = integral over R of tau^p / (1 + kappa tau^2)^q, p < 2q-1,
// from the Beta function (zero for odd p).
double I_pq(int p, int q, double kappa2);

struct IpqCheck {
  double beta = 0.0;
  double quadrature = 0.0;  // truncated to |tau| <= T
  double truncation = 0.0;  // T
  double tail_bound = 0.0;  // bound on the discarded tails
  double rel_diff = 0.0;
};
IpqCheck I_pq_crosscheck(int p, int q, double kappa2);

// Integral of tau^p / (dist + gamma - x2)^q over the gap window.
double gap_integral(int p, int q, const lub::GapContext& ctx, const quad::Options& opt = {});

struct Exponent {
  double value = 0.0;
  bool bounded = false;
};
// Predicted small-distance exponent of gap_integral(p, q).
Exponent predicted_exponent(int p, int q);

struct ExponentRow {
  int p = 0;
  int q = 0;
  double theta = 0.0;
  Exponent predicted;
  double fitted = 0.0;       // exponent with a sqrt(d) correction term
  double plain_slope = 0.0;  // uncorrected log-log slope, diagnostic only
  bool exact_zero = false;
  bool pass = false;
};

struct ExponentOptions {
  double d_lo = 1e-6;
  double d_hi = 1e-3;
  int per_decade = 4;
  double tol = 0.05;
};

std::vector<ExponentRow> exponent_suite(const ChannelBody& body, const std::vector<double>& thetas,
                                        const std::vector<int>& ps, const std::vector<int>& qs,
                                        const ExponentOptions& opt = {});

struct KappaProfile {
  double kappa2 = 0.0;
  // I[p][q] for p in 0..7, q in 1..4; NaN where the integral diverges.
  std::array<std::array<double, 5>, 8> I{};
  std::array<double, 4> K{};  // K[i] = I_{2i, i+1}, i = 1..3
  double den_inf = 0.0;
  double num_inf = 0.0;
  double c_inf_perp = 0.0;
  double c_inf_parallel = 0.0;
  double c_inf_rotation = 0.0;
  double x2 = 0.0;  // X2(kappa2)
  // Leading coefficients of sqrt(d) G_i / kappa3.
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  // kappa3 * I_mopt is the limit of sqrt(d) M_opt.
  double I_mopt = 0.0;
  // Largest relative deviation between Beta values and truncated quadrature.
  double max_crosscheck = 0.0;
};
KappaProfile kappa_profile(double kappa2, const ChannelBody& body, bool crosscheck = false);

struct MOptDecomposition {
  double G1 = 0.0;
  double G2 = 0.0;
  double G3 = 0.0;
  double M_direct = 0.0;  // 2D quadrature of the shear pairing
  double M_reduced = 0.0; // 1D reduction of the same pairing
  lub::CStar c;
};
MOptDecomposition m_opt_decomposition(double theta, double dist, const ChannelBody& body);

} // namespace cgap::asym
