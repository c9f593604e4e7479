#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cgap/flowfield.hpp"
#include "cgap/geometry.hpp"
#include "cgap/jet.hpp"
#include "cgap/lubrication.hpp"

namespace cgap::res {

using geometry::ChannelBody;
using geometry::Pose;
using lub::Motion;

// Outer blending factor P1(s) zeta_x(x1) with
// s = sigma d_w / (sigma d_w + d_b), d_w = y (2L - y) / (2L) and
// d_b = 2(Q - sqrt(Q)) / |grad Q| a first-order distance to the body; zeta_x is 1 for
// |x1| <= x_inner and 0 for |x1| >= x_outer.
struct BlendOptions {
  double outer_scale = 1.0;      // sigma for the perpendicular field
  double outer_scale_rot = 0.35;  // sigma for the parallel and rotation fields
  double x_inner = 1.1;
  double x_outer = 4.5;
  // Radial cutoff in d_b, 1 below body_inner and 0 beyond body_outer
  // (disabled when body_outer <= 0).
  double body_inner = 0.1;
  double body_outer = 0.0;
  // Resistance assembly: pick the flux constants c that minimize the full
  // dissipation (true) or keep the gap-optimal c* (false).
  bool global_constants = true;
};

// Panel counts (8-point Gauss-Legendre per panel) for the domain quadrature.
struct Resolution {
  int core = 12;   // gap core |tau| <= lambda_star, in u with tau = sqrt(d) sinh(u)
  int blend = 4;   // lambda_star <= |tau| <= 2 lambda_star
  int side = 6;    // pieces reaching the body tips, graded toward the tips
  int outer = 6;   // pieces beyond the body
  int y = 8;       // vertical panels per segment outside the gap core
  Resolution scaled(int k) const { return {core * k, blend * k, side * k, outer * k, y * k}; }
};

// Lower-wall test fields for the three elementary rigid motions. Points are
// given by x1 and the height y = x2 + L above the lower wall.
class TestField {
public:
  TestField(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend = {});

  const lub::GapContext& gap() const { return gap_; }
  // Flux constants in use; the gap-optimal c* by default.
  const lub::CStar& constants() const { return c_; }
  void set_constants(const lub::CStar& c) { c_ = c; }
  const ChannelBody& body() const { return body_; }
  const BlendOptions& blend() const { return blend_; }
  double h() const { return h_; }
  double x1c() const { return gap_.shape.x1; }
  double x2c() const { return gap_.shape.x2; }
  double dist() const { return gap_.dist; }
  double halfwidth() const { return gap_.shape.halfwidth; }

  // Heights of the lower and upper body boundary at x1 (|x1| < halfwidth).
  double y_lower(double x1) const;
  double y_upper(double x1) const;
  bool in_fluid(double x1, double y) const;

  // Stream-function jets in (x1, y) for perp, parallel and rotation with
  // c = 0, then the derivatives with respect to c of the perpendicular field
  // (index 3) and of the parallel and rotation fields (index 4).
  std::array<Jet2, 5> eval_raw(double x1, double y) const;
  // Jets for the three kinds with the constants in use.
  std::array<Jet2, 3> eval(double x1, double y) const;
  Jet2 psi(const Motion& m, double x1, double y) const;
  // Velocity (-d2 psi, d1 psi) of motion m at (x1, x2).
  std::array<double, 2> velocity(const Motion& m, double x1, double x2) const;

private:
  ChannelBody body_;
  BlendOptions blend_;
  double h_;
  geometry::QuadCoeffs q_;
  lub::GapContext gap_;
  lub::CStar c_;
};

// Calls f(x1, y, weight) at every node of the fluid-domain quadrature over
// |x1| <= x_outer (extended to |x1| <= x_extent if larger).
void for_each_node(const TestField& tf, const Resolution& res,
                   const std::function<void(double, double, double)>& f, double x_extent = 0.0);

// Pairings of the three elementary fields in the lower frame.
struct Pairings {
  // D[k][l] = 2 int D(v_k):D(v_l), over the fluid domain.
  double D[3][3] = {};
  // G[k][l] = int grad v_k : grad v_l.
  double G[3][3] = {};
  double M[3][3] = {};  // int v_k . v_l (velocity L2 pairing)
  // Poiseuille forcing per unit lambda0 (F1) and lambda0^2 (F2): int g-hat . v_k.
  double F1[3] = {};
  double F2[3] = {};
};

// Same pairings for the c = 0 fields and the two c-derivative fields.
struct RawPairings {
  double D[5][5] = {};
  double G[5][5] = {};
  double M[5][5] = {};
  double F1[5] = {};
  double F2[5] = {};
  // Forcing of the mirrored physical source (used for the upper wall) at the
  // branch weights chi = 0, 1/2, 1; see chi_nodes.
  double F1m[3][5] = {};
  double F2m[3][5] = {};
};
inline constexpr double chi_nodes[3] = {0.0, 0.5, 1.0};
// Quadratic Lagrange interpolation through values at chi_nodes.
inline double chi_interp(const double q[3], double c) {
  return q[0] * (1.0 - c) * (1.0 - 2.0 * c) + 4.0 * q[1] * c * (1.0 - c) + q[2] * c * (2.0 * c - 1.0);
}
RawPairings raw_pairings(const TestField& tf, const Resolution& res = {}, bool forcing = true,
                         bool mirrored_forcing = false);
// Constants minimizing 2 int |D(v_k)|^2 for each kind.
lub::CStar optimal_constants(const RawPairings& p);
// source < 0 picks the direct forcing, 0..2 the mirrored forcing at chi_nodes[source].
Pairings reduce(const RawPairings& p, const lub::CStar& c, int source = -1);

// Pairings with the field's own constants.
Pairings pairings(const TestField& tf, const Resolution& res = {}, bool with_forcing = true);

// Pairing of a motion with itself from the elementary pairings.
double quadratic(const double M[3][3], const Motion& a, const Motion& b);

// Lower-frame resistance in the (d', theta') basis with fields
// a = perp, b = rotation - x2 parallel, and the generalized forcing.
struct LowerFrame {
  double Rhat[2][2] = {};
  double Mhat[2][2] = {};  // velocity L2 pairing of the basis fields
  double F1hat[2] = {};
  double F2hat[2] = {};
  double x1c = 0.0;
  double dist = 0.0;
};
LowerFrame lower_frame(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend = {},
                       const Resolution& res = {});

struct ResistanceModel {
  double R[2][2] = {};
  double F_pois[2] = {};
  double asymmetry = 0.0;  // |R12 - R21| / |R| before symmetrization
  double dist = 0.0;
};

// Blend weight of the lower frame: 1 for h <= -1/4, 0 for h >= 1/4.
double lower_weight(double h);

// Exact assembly (two-frame blend, calibrated so F_pois(0,0) = 0).
ResistanceModel resistance_and_forcing(const Pose& pose, const ChannelBody& body, double lambda0,
                                       const BlendOptions& blend = {}, const Resolution& res = {});

// Tabulated lower-frame data on (s, theta), s = log d + d / d_lin, with
// Catmull-Rom bicubic interpolation; the singular entries are stored rescaled
// by d^(3/2), d^(1/2). The mirrored source is stored at the three chi_nodes
// and recombined exactly for the physical branch weight.
struct TableOptions {
  int n_dist = 32;
  int n_theta = 24;
  double d_min = 1e-6;
  double d_lin = 0.5;
  BlendOptions blend;
  Resolution res;
};

// Cache file for a table: $CGAP_CACHE_DIR, else $XDG_CACHE_HOME/cgap, else
// $HOME/.cache/cgap, named by a hash of the table key. Empty when no
// directory is available. The directory is created on demand.
std::string default_cache_path(const ChannelBody& body, const TableOptions& opt = {});

class ResistanceTable {
public:
  ResistanceTable() = default;
  static ResistanceTable build(const ChannelBody& body, const TableOptions& opt = {}, int jobs = 1);
  // Loads from path when the stored parameters match, otherwise builds and saves.
  static ResistanceTable cached(const std::string& path, const ChannelBody& body, const TableOptions& opt = {},
                                int jobs = 1);
  bool save(const std::string& path) const;
  // `out` supplies the expected key; use the overload below for a fresh table.
  static bool load(const std::string& path, ResistanceTable& out);
  static bool load(const std::string& path, const ChannelBody& body, const TableOptions& opt, ResistanceTable& out);

  LowerFrame lower(double h, double theta) const;
  ResistanceModel model(const Pose& pose, double lambda0) const;
  const ChannelBody& body() const { return body_; }
  std::string key() const;
  // Identity string of a table for the given parameters (first line of the cache file).
  static std::string key_for(const ChannelBody& body, const TableOptions& opt);

private:
  ChannelBody body_;
  TableOptions opt_;
  double d_max_ = 0.0;
  // values_[k][i][j] over the stored channels.
  std::vector<std::vector<std::vector<double>>> values_;
  double coord(double d) const;
  double interp(int k, double s, double theta) const;
};

// Norms of the unit basis fields used for the trace scalings.
struct TraceNorms {
  double perp = 0.0;      // |grad v_perp|
  double parallel = 0.0;  // |grad v_parallel|
  double rotation = 0.0;  // |grad v_rot| (pivot at the contact point)
  double composed = 0.0;  // |grad (v_rot - x2 v_parallel)|
};
TraceNorms trace_norms(const Pose& lower_pose, const ChannelBody& body, const BlendOptions& blend = {},
                       const Resolution& res = {});

} // namespace cgap::res
