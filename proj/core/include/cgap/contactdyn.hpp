#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cgap/geometry.hpp"
#include "cgap/integrator.hpp"
#include "cgap/resistance.hpp"

namespace cgap::dyn {

using geometry::ChannelBody;
using geometry::Pose;

// Restoring potential H(h, theta). Hooke by default; a user potential
// supplies its value and gradient.
struct PotentialSpec {
  double r_h = 1.0;
  double r_theta = 1.0;
  std::function<double(double, double)> user_value;
  std::function<std::array<double, 2>(double, double)> user_gradient;

  static PotentialSpec hooke(double r_h, double r_theta);
  static PotentialSpec user(std::function<double(double, double)> value,
                            std::function<std::array<double, 2>(double, double)> gradient);
  bool is_hooke() const { return !user_value; }
  double value(double h, double theta) const;
  std::array<double, 2> gradient(double h, double theta) const;
};

struct PotentialCheck {
  double H0 = 0.0;
  double coercivity = 0.0;  // min of H / ((h^2 + theta^2) / 2) on the sample
  double structural = 0.0;  // min of (h H_h + theta H_theta) / H
  double rho_bar = 0.0;
  double varpi_bar = 0.0;
  bool zero_at_origin = false;
  bool coercive = false;
  bool structural_ok = false;
  bool ok() const { return zero_at_origin && coercive && structural_ok; }
};
// Samples the admissible band |theta| <= theta_max on an n x n grid. For
// Hooke the defaults rho_bar = min(r_h, r_theta), varpi_bar = 2 apply when
// the arguments are negative.
PotentialCheck check_potential(const PotentialSpec& p, const ChannelBody& body, double rho_bar = -1.0,
                               double varpi_bar = -1.0, double theta_max = geometry::kPi, int n = 41);

// Mass and moment of inertia of the body at unit density.
struct Inertia {
  double m = 0.0;
  double J = 0.0;
  static Inertia of(const ChannelBody& body);
};

struct State {
  double t = 0.0;
  double h = 0.0;
  double theta = 0.0;
  double hdot = 0.0;
  double thetadot = 0.0;
};

// Modulation amplitude. With F(k) = (K3'(k) I(k) - 12 I_{4,3}(k)) / (6 I_{2,2}(k))
// and G(k) = -int_{kmin}^{k} F, a(t) = exp(G(kappa2[theta(t)]) - G(kappa2[theta(T-)])).
class Amplitude {
public:
  explicit Amplitude(const ChannelBody& body);
  double F(double kappa2) const;
  double G(double kappa2) const;
  // G(k1) - G(k0), cheap for nearby arguments.
  double G_increment(double k0, double k1) const;
  // a'/(a theta') from the curvature data at theta, without the K3 potential:
  // -(kappa3 I - 12 d_theta kappa2 I_{4,3}) / (6 I_{2,2}).
  double log_rate(double theta) const;
  // a at angle theta with a = 1 at theta_ref.
  double closed_form(double theta, double theta_ref) const;
  const ChannelBody& body() const { return body_; }

private:
  ChannelBody body_;
  geometry::K2Maps maps_;
};

struct AmplitudePath {
  std::vector<double> t;
  std::vector<double> closed;  // closed form
  std::vector<double> ode;     // integrated ODE for log a
  double max_rel_diff = 0.0;
  double a_min = 0.0;
  double a_max = 0.0;
};
// Evaluates a along theta(t), t in [t0, t1], at `samples` equally spaced
// times by both routes; a(t0) = 1.
AmplitudePath amplitude(const std::function<double(double)>& theta, const std::function<double(double)>& thetadot,
                        double t0, double t1, int samples, const ChannelBody& body,
                        const ode::Tolerances& tol = {1e-12, 1e-14});

// Coefficient of 1/sqrt(d) in Mod: 6 a' I_{2,2} + a theta' (kappa3 I - 12 d_theta kappa2 I_{4,3}),
// with a = 1 and a' from the closed form (or a' = 0 when frozen).
struct ModCoefficient {
  double value = 0.0;
  double amplitude_term = 0.0;  // 6 a' I_{2,2}
  double kappa3_term = 0.0;     // a theta' kappa3 I
  double i43_term = 0.0;        // -12 a theta' d_theta kappa2 I_{4,3}
  double scale = 0.0;           // sum of the absolute constituent terms
  double relative = 0.0;        // |value| / scale (0 when scale = 0)
};
ModCoefficient mod_coefficient(double theta, double thetadot, const ChannelBody& body, bool freeze_amplitude = false);

// The three singular parts of Mod at finite distance:
// 6 a' J22 - 12 a theta' J43 + a theta' M_opt, with J22, J43 the finite-gap
// integrals of (tau - c)^2 / g^2 and d_theta(gamma - x2) (tau - c)^2 / g^3.
double mod_at_distance(double theta, double thetadot, double dist, const ChannelBody& body,
                       bool freeze_amplitude = false);

struct ModSweep {
  std::vector<double> dist;
  std::vector<double> mod;
  double slope = 0.0;  // fitted exponent of |Mod| in d
};
ModSweep mod_sweep(double theta, double thetadot, const std::vector<double>& dists, const ChannelBody& body,
                   bool freeze_amplitude = false);

// Contact potential in the frame of the nearest wall.
struct ContactPotential {
  double Pc0 = 0.0;       // 6 int (tau - c_perp)^2 / g^2
  double Pc = 0.0;        // a Pc0 - (<u, a v_perp> + m h' a)
  double momentum = 0.0;  // <u, v_perp> + m h' (frame velocities)
  double a = 1.0;
  double dist = 0.0;
};
// `frame` holds the lower-frame data (Mhat, x1c) of the nearest-wall frame
// pose; u is the test-field velocity of the current (h', theta').
ContactPotential contact_potential(const State& s, const ChannelBody& body, const res::LowerFrame& frame,
                                   double a, const Inertia& inertia);
// Same with the frame data computed by exact quadrature.
ContactPotential contact_potential(const State& s, const ChannelBody& body, double a, const Inertia& inertia);

// Multiplier field w = curl(zeta b), b = h x1 + theta ((x1)^2 + (x2 - h)^2) / 2,
// which is h e2 + theta (x - h e2)^perp on the body and vanishes near the walls.
// zeta is a step in rho = sqrt(Q) - 1 (Q the body's quadratic form about its
// centre) from 1 at rho <= rho_2 / 2 to 0 at rho >= rho_2, rho_2 = min(rho_max,
// 0.9 d / r) with r the depth of the contact point.
class MultiplierField {
public:
  MultiplierField(const Pose& pose, const ChannelBody& body, double dist_min = 1e-3, double rho_max = 0.5);
  std::array<double, 2> velocity(double x1, double x2) const;
  // Velocity gradient dw_i/dx_j.
  std::array<std::array<double, 2>, 2> gradient(double x1, double x2) const;
  double stream(double x1, double x2) const;
  double divergence(double x1, double x2) const;
  bool in_fluid(double x1, double x2) const;
  struct Norms {
    double l2 = 0.0;
    double grad_l2 = 0.0;
  };
  // L2 norms over the fluid part of the channel, tensor Gauss-Legendre.
  Norms norms(int panels = 24) const;
  double rho2() const { return rho2_; }

private:
  Pose pose_;
  ChannelBody body_;
  geometry::QuadCoeffs q_;
  double rho2_ = 0.0;
  // zeta and its derivatives up to second order at x.
  void zeta(double x1, double x2, double& z, double dz[2], double d2z[2][2]) const;
};

enum class ResistanceSource { table, exact, refresh };

struct SimConfig {
  ChannelBody body;
  double lambda0 = 0.0;
  PotentialSpec potential;
  Inertia inertia;  // zero entries are replaced by Inertia::of(body)
  State initial;
  double t_end = 200.0;
  double output_dt = 0.5;
  ode::Tolerances tol{1e-9, 1e-12};
  double omega = -1.0;       // negative: omega_0 from the trajectory
  double theta_max = geometry::kPi;
  double max_dist_change = 0.1;  // relative change of d per step
  ResistanceSource source = ResistanceSource::table;
  double refresh_increment = 1e-3;
  bool diagnostics = true;  // contact potential and amplitude per sample
};

struct EnergyReport {
  double Ekin = 0.0;
  double Etot = 0.0;
  double Eomega = 0.0;
  double cross = 0.0;  // m h h' + J theta theta'
  double Pc = 0.0;
  double a = 1.0;
  double dist = 0.0;
};

struct Sample {
  State s;
  EnergyReport e;
};

struct Trajectory {
  std::vector<Sample> samples;
  ode::IntegratorStats stats;
  std::string status = "ok";  // ok, underflow, theta_guard, non_spd, error
  std::string message;
  double omega = 0.0;
  double dist_min = 0.0;
  // Largest per-step |Delta E_tot + int q'Rq' - int F q'| over the step tolerance.
  double max_balance_ratio = 0.0;
  long model_evaluations = 0;
  bool ok() const { return status == "ok"; }
};

// The ROM: m h'' = -H_h - (R q')_h + F_h and J theta'' = -H_theta - (R q')_theta + F_theta.
// `table` is required for ResistanceSource::table.
Trajectory simulate(const SimConfig& cfg, const res::ResistanceTable* table = nullptr,
                    const std::function<void(const Sample&)>& on_sample = {});

// Sandwich E_tot/2 <= E_omega <= 3 E_tot/2 at every sample.
bool sandwich_holds(const Trajectory& tr, double omega);
// Largest omega in [0, cap] keeping the sandwich, by bisection.
double omega0(const Trajectory& tr, double cap = 0.5);
// Recomputes E_omega of every sample for the given omega.
void apply_omega(Trajectory& tr, double omega);

struct DecayDiagnostics {
  double beta_fit = 0.0;  // decay rate of E_tot above its floor
  double E_floor = 0.0;   // median of E_tot over the last tenth of the run
  double dist_min = 0.0;
  bool sandwich = false;
  bool monotone = false;  // E_tot non-increasing (up to roundoff)
  int fit_points = 0;
};
// Throws DomainError when fewer than three samples lie above 10 E_floor, unless
// require_fit is false, in which case beta_fit is NaN.
DecayDiagnostics decay_diagnostics(const Trajectory& tr, bool require_fit = true);

} // namespace cgap::dyn
