#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdv/grid.hpp"
#include "rdv/morrey.hpp"

namespace rdv {

enum class EnsembleKind { fourier, bumps, mixed };

std::string to_string(EnsembleKind k);
EnsembleKind parse_ensemble_kind(const std::string& s);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::mixed;
  std::size_t mode_count = 8;
  std::size_t bump_count = 4;
  double amplitude_min = 0.0;
  double amplitude_max = 1.0;
  bool nonnegative = true;
  /// Smallest bump radius, never below 4h on the target grid.
  double min_width = 0.0;
  std::uint64_t seed = 1;
  std::size_t sample_count = 1000;

  void validate() const;
};

/// Sample k depends only on (seed, k) and the grid.
/// fourier: sum_{j=1..K} a_j cos(j pi x / L), |a_j| uniform in the amplitude
///   range with random sign; shifted by sum |a_j| when nonnegative.
/// bumps: sum of c_j * phi((x - x_j)/w_j) over 1..bump_count terms (count
///   drawn per sample), phi the cubed plateau, w_j log-uniform in
///   [min_width, L/4], x_j uniform in [2 w_j, L - 2 w_j].
/// mixed: each sample picks fourier, bumps or their sum.
std::vector<Field> generate_ensemble(const Grid1D& grid, const EnsembleSpec& spec);

/// int phi^2 u^4 / [ ||u||_{L1(supp phi)}^2 (int phi^2 |u_x|^2 + C_phi^3 ||u||_{L1(supp phi)}^2) ].
/// 0 when both sides vanish.
double check_key1(const Field& u, const CutoffFunction& phi);

/// <phi^2, |u|^{4+d}> / [ ||u||_1^{2-d} ||u||_2^{2d} <phi^2, |u_x|^2> + C_phi^{3+d} ||u||_1^{4+d} ],
/// norms over supp phi, constant 1 in front of both terms.
double check_key2(const Field& u, const CutoffFunction& phi, double delta);

class PartitionError : public std::runtime_error {
 public:
  PartitionError(const std::string& what, std::size_t piece, std::size_t node);
  std::size_t piece;
  std::size_t node;
};

/// phi_j = w_j / sqrt(sum_k w_k^2), w_j = plateau((x - x_j)/eps)^3 with centres
/// x_j = j * stride_factor * eps, j = 0 .. ceil(L / (stride_factor * eps)).
/// Each piece records C_j = max |phi_j'| / phi_j^{1/3}, taken over the nodes
/// and 8 interior points per cell. Every call re-verifies sum phi_j^2 = 1,
/// values in [0, 1] and the bound at the nodes; failure throws PartitionError.
std::vector<CutoffFunction> partition_of_unity(const Grid1D& grid, double eps, double stride_factor = 1.0);

/// int u^4 - eps_weight * ||u||_M^2 * ||u_x||_2^2 - c_cal * ||u||_1^4; holds iff <= 0.
double check_interp_morrey(const Field& u, const MorreyParams& morrey, double eps_weight, double c_cal);

/// Smallest c_cal making check_interp_morrey <= 0, clipped at 0.
double interp_morrey_threshold(const Field& u, const MorreyParams& morrey, double eps_weight);

enum class InequalityId { key1, key2, interp_morrey };

std::string to_string(InequalityId id);
InequalityId parse_inequality(const std::string& s);

/// Parameters that stay fixed while the constant is calibrated.
struct InequalityParams {
  InequalityId id = InequalityId::key1;
  double delta = 0.25;       // key2 exponent, Morrey exponent for interp_morrey
  double eps_weight = 1.0;   // interp_morrey only
  /// Cutoff radii as fractions of L and centres as fractions of L (key1/key2).
  std::vector<double> cutoff_radii = {1.0 / 8.0, 1.0 / 16.0};
  std::vector<double> cutoff_centers = {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
};

/// Per-sample minimal constant: max over the cutoff family of the key ratio,
/// or the interp_morrey threshold.
double sample_constant(const Field& u, const InequalityParams& params);

struct CalibrationResult {
  double constant = 0.0;  // sup over the ensemble of the per-sample constant
  std::size_t argmax = 0;
  std::vector<double> per_sample;
};

CalibrationResult calibrate_constant(const std::vector<Field>& ensemble, const InequalityParams& params,
                                     bool parallel = true);

struct ValidationResult {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;
  std::optional<std::size_t> witness;  // first violating sample
};

/// Counts samples whose minimal constant exceeds `constant`.
ValidationResult validate_constant(const std::vector<Field>& ensemble, const InequalityParams& params,
                                   double constant, bool parallel = true);

struct InequalityReport {
  std::string inequality;
  double delta = 0.0;
  double eps_weight = 0.0;
  std::size_t samples = 0;
  double max_ratio = 0.0;      // training sup
  double calibrated_c = 0.0;   // safety_factor * max_ratio
  std::size_t violations = 0;  // on the held-out ensemble
  double heldout_max_ratio = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t heldout_seed = 0;
  std::optional<std::size_t> witness;
};

/// Calibrates on `train`, scales by safety_factor * calibration_scale, and
/// validates on a held-out ensemble built from the same spec with `heldout_seed`.
InequalityReport run_inequality_check(const Grid1D& grid, const EnsembleSpec& train,
                                      std::uint64_t heldout_seed, const InequalityParams& params,
                                      double safety_factor = 1.5, double calibration_scale = 1.0);

struct XiBound {
  double xi_max = 0.0;
  bool strict = true;  // admissible set is [0, xi_max), open at xi_max
};

/// Supremum of xi >= 0 with delta (2 - xi) > xi (3 + xi). delta <= 0 gives 0;
/// delta >= 1 is rejected.
XiBound xi_admissible(double delta);

}  // namespace rdv
