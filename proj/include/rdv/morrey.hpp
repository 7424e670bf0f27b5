#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rdv/grid.hpp"
#include "rdv/solver.hpp"

namespace rdv {

/// Window set for the discrete Morrey norm. Radii form a geometric ladder
/// L * 2^{-j/s}, j = s .. octaves*s, with s = radii_per_octave; s = 1 gives
/// the plain dyadic set {L/2, ..., L/2^octaves}. Centres are all grid nodes.
struct MorreyParams {
  double delta = 0.25;
  int octaves = 10;
  int radii_per_octave = 8;

  void validate() const;
  std::vector<double> radii(double length) const;
};

struct MorreyValue {
  double value = 0.0;
  double center = 0.0;
  double radius = 0.0;
};

/// max over centres x0 and radii eps of eps^{-delta} * int_{[x0-eps, x0+eps] cap Omega} |f|.
double morrey_norm(const Field& f, const MorreyParams& params);
MorreyValue morrey_norm_detail(const Field& f, const MorreyParams& params);
/// Same value through the cell-by-cell serial kernel.
MorreyValue morrey_norm_reference(const Field& f, const MorreyParams& params);

/// C^2 plateau: 1 on |s| <= 1, 0 on |s| >= 2, quintic smoothstep in between.
double plateau_profile(double s);
double plateau_profile_derivative(double s);

/// int over R of plateau_profile(s)^3 ds.
double reference_bump_mass();

struct CutoffFunction {
  double center = 0.0;
  double radius = 0.0;
  double vanishing_exponent = 1.0 / 3.0;
  double c_phi = 0.0;  // max over nodes with phi > 1e-14 of |phi'| / phi^a
  Field values{Grid1D{1.0, 3}};
  Field derivative{Grid1D{1.0, 3}};
};

/// phi(x) = plateau_profile((x - x0)/eps)^3 with its exact derivative.
/// Requires 0 < eps < L and a in [1/3, 2/3).
CutoffFunction make_cutoff(const Grid1D& grid, double eps, double x0, double vanishing_exponent);

/// First node where |phi'| > c_phi * phi^a * (1 + slack) with phi > 1e-14.
std::optional<std::size_t> cutoff_bound_violation(const CutoffFunction& phi, double slack = 1e-12);

/// integrate(z * phi).
double localized_mass(const Field& z, const CutoffFunction& phi);

/// Rows of nodal values on one grid, one row per time.
struct SpaceTimeArray {
  Grid1D grid{1.0, 3};
  std::vector<double> times;
  std::vector<std::vector<double>> rows;

  std::size_t time_count() const { return times.size(); }
  std::size_t sample_count() const { return times.size() * grid.size(); }
  Field row(std::size_t i) const { return Field(grid, rows[i]); }
};

struct AuxiliaryFields {
  SpaceTimeArray z;  // sum_i u_i
  SpaceTimeArray w;  // sum_i d_i u_i
  SpaceTimeArray y;  // d/dx of int_tau^t w ds
};

/// z, w and Y over the snapshots with time >= tau. tau must be a snapshot
/// time and at least two snapshots must follow from it (tau included).
/// Entries of Y within 16 ulp-scaled difference quotients of the running
/// integral are set to zero, so spatially flat runs give Y == 0 exactly.
AuxiliaryFields auxiliary_fields(const Trajectory& traj, double tau);

struct HolderOptions {
  std::size_t pair_count = 100'000;
  std::uint64_t seed = 1;
  double quantile = 0.99;
  /// Largest index offset as a fraction of the array extent in each direction,
  /// but never fewer than 16 steps (or the whole extent when shorter).
  double max_offset_fraction = 1.0 / 32.0;
  bool parallel = true;
};

struct HolderEstimate {
  double gamma = 1.0;
  double constant = 0.0;
  double fit_residual = 0.0;         // mean pinball loss at the optimum
  std::size_t pair_count = 0;        // pairs with dY != 0 used in the fit
  double violation_fraction = 0.0;   // pairs above the fitted envelope
  bool degenerate = false;
};

/// Envelope fit |dY| <= C * rho^gamma at the given upper quantile over seeded
/// random pairs, rho = |dx|^2 for pairs on one time row and rho = |dt| for
/// pairs on one node. Each direction is fitted separately and gamma is the
/// smaller slope; C is the larger offset at that gamma. Index offsets are
/// log-uniform up to max_offset_fraction of the extent.
HolderEstimate estimate_holder(const SpaceTimeArray& y, const HolderOptions& opts = {});

/// gamma / (1 + 2 gamma); gamma must be positive.
double delta_from_gamma(double gamma);

struct MorreySeries {
  std::vector<double> times;
  std::vector<double> z;                     // Morrey norm of z at each time
  std::vector<std::vector<double>> species;  // [species][time]
  double sup_z = 0.0;
  std::vector<double> sup_species;
  /// sup over the second half of the time span divided by sup over the first half.
  double nonconcentration_ratio = 0.0;
};

MorreySeries track_morrey(const Trajectory& traj, const MorreyParams& params);

}  // namespace rdv
