#pragma once

#include <cmath>

#include "cgap/errors.hpp"

namespace cgap::geometry {

inline constexpr double kPi = 3.14159265358979323846;

// Ellipse with semi-axes 1 and e in the channel |x2| < L.
struct ChannelBody {
  double e = 0.5;
  double L = 3.0;
  // Half-length of the gap window around the contact abscissa.
  double lambda_star = default_lambda_star(0.5);

  ChannelBody() = default;
  ChannelBody(double e_, double L_, double lambda_star_ = -1.0);

  // 0.4 times the smallest distance, over theta, between the contact abscissa
  // and the end of the vertical projection, so that [-2 lambda_star,
  // 2 lambda_star] stays inside the graph chart with a margin.
  static double default_lambda_star(double e);
  static double graph_margin(double e);
  double kappa2_min() const { return 0.5 * e; }
  double kappa2_max() const { return 0.5 / (e * e); }
};

struct Pose {
  double h = 0.0;
  double theta = 0.0;
};

enum class Wall { lower, upper };

const char* to_string(Wall w);

// Local description of the gap in the frame of the nearest wall. For the
// upper wall the pose is mirrored (h, theta) -> (-h, -theta) first, so every
// field below refers to a lower-wall configuration.
struct GapFrame {
  double h = 0.0;      // frame pose
  double theta = 0.0;  // frame angle, reduced to (-pi/2, pi/2]
  double x1 = 0.0;
  double x2 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double dist = 0.0;
  Wall wall = Wall::lower;
};

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct QuadCoeffs {
  double A;  // coefficient of x1^2
  double B;  // coefficient of x1 x2
  double C;  // coefficient of x2^2
};

double reduce_angle(double theta);

// sin and cos with exact values at multiples of pi/2.
void sincos_exact(double theta, double& s, double& c);

QuadCoeffs quad_coeffs(double theta, double e);

// Signed level function of the rotated ellipse: A x1^2 + B x1 x2 + C x2^2 - 1.
double level(double theta, double x1, double x2, double e);

// Half-width of the vertical projection of the rotated ellipse.
double graph_halfwidth(double theta, double e);

// Lower (and upper) boundary of the rotated ellipse as graphs over x1.
double graph_lower(double theta, double x1, double e);
double graph_upper(double theta, double x1, double e);

Point contact_point(double theta, const ChannelBody& body);

// Lower boundary near the contact point, gamma(tau) = graph_lower(tau + x1).
double gap_profile(double theta, double tau, const ChannelBody& body);

struct GapProfileDerivs {
  double g;
  double g1;
  double g2;
};
GapProfileDerivs gap_profile_derivs(double theta, double tau, const ChannelBody& body);

struct Curvature {
  double kappa2;
  double kappa3;
};
Curvature curvature_coeffs(double theta, const ChannelBody& body);

// gamma[theta](tau) - x2[theta], evaluated without cancellation.
double gap_rise(double theta, double tau, const ChannelBody& body);

// Precomputed gap description for repeated evaluation at a fixed angle.
struct GapShape {
  double theta = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double e2 = 0.0;
  double C = 0.0;
  double s0 = 0.0;
  double halfwidth = 0.0;

  template <class T>
  T rise(const T& tau) const {
    using std::sqrt;
    const T s1 = sqrt(C - (x1 + tau) * (x1 + tau) / e2);
    const T num = x1 * (2.0 * x1 + tau) / (e2 * (s1 + s0)) + s0;
    return tau * tau * num / ((e2 * C * s0) * (s1 + s0));
  }
};
GapShape gap_shape(double theta, const ChannelBody& body);

// d kappa2 / d theta.
double dtheta_kappa2(double theta, const ChannelBody& body);

// (d x1/d theta, d x2/d theta) from the linear system obtained by
// differentiating the contact conditions.
Point dtheta_contact(double theta, const ChannelBody& body);

struct TaylorFit {
  double kappa2;
  double kappa3;
  double kappa4;
};
// Finite-difference Taylor coefficients of gap_profile at tau = 0 (central
// differences, Richardson-extrapolated). Step defaults to 1e-3 * lambda_star.
TaylorFit taylor_fit(double theta, const ChannelBody& body, double step = -1.0);

// Maps between the contact ordinate x2 and kappa2 on theta in [0, pi/2], and
// the potential K3 with kappa3 = K3'(kappa2) * d_theta kappa2.
class K2Maps {
public:
  explicit K2Maps(const ChannelBody& body);

  double kmin() const { return kmin_; }
  double kmax() const { return kmax_; }

  // kappa2 as a function of x2 in [-1, -e].
  double K2(double x2) const;
  // Inverse map, by bracketed root finding on theta.
  double X2(double kappa2) const;
  double dX2(double kappa2) const;
  // Integrand xi - xi^2 X2'(xi) / X2(xi).
  double k3_density(double kappa2) const;
  double K3(double kappa2) const;
  double dK3(double kappa2) const { return -k3_density(kappa2); }
  // theta in [0, pi/2] with kappa2[theta] = kappa2.
  double theta_of(double kappa2) const;

private:
  ChannelBody body_;
  double kmin_;
  double kmax_;
  void check(double kappa2) const;
};

bool admissible(const Pose& pose, const ChannelBody& body);
void require_admissible(const Pose& pose, const ChannelBody& body);

Pose mirror(const Pose& pose);

struct Distance {
  double dist;
  Wall wall;
};
Distance distance(const Pose& pose, const ChannelBody& body);

GapFrame lower_frame(const Pose& pose, const ChannelBody& body);
GapFrame frame(const Pose& pose, const ChannelBody& body);

// Quadratic pinch constants on [-w, w], w = window * lambda_star:
// c1 tau^2 <= gamma - x2 <= c2 tau^2 and c3 tau^2 <= d_theta(gamma - x2) <= c4 tau^2,
// from the Taylor bound kappa2 -+ (w/6) sup|gamma'''| (and its theta derivative).
struct PinchConstants {
  double c1;
  double c2;
  double c3;
  double c4;
};
PinchConstants pinch_constants(const ChannelBody& body, int n_theta = 64, int n_tau = 64,
                                double window = 1.0);

// d_theta gamma[theta](tau) at fixed tau, by central difference.
double dtheta_gap_profile(double theta, double tau, const ChannelBody& body, double step = 1e-5);

// Templated lower graph for automatic differentiation.
template <class T>
T graph_lower_t(const QuadCoeffs& q, double e, const T& x1) {
  using std::sqrt;
  return (-0.5 * q.B / q.C) * x1 - sqrt(q.C - x1 * x1 / (e * e)) / q.C;
}
template <class T>
T graph_upper_t(const QuadCoeffs& q, double e, const T& x1) {
  using std::sqrt;
  return (-0.5 * q.B / q.C) * x1 + sqrt(q.C - x1 * x1 / (e * e)) / q.C;
}

} // namespace cgap::geometry
