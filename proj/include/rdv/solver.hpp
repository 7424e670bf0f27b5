#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdv/systems.hpp"

namespace rdv {

enum class DiffusionScheme { backward_euler, crank_nicolson };

struct SolverConfig {
  double dt_initial = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double cfl_reaction = 0.1;  // dt <= cfl_reaction / |df/du|
  DiffusionScheme scheme = DiffusionScheme::backward_euler;
  double blowup_threshold = 1e12;
  std::size_t snapshot_stride = 1;
  /// When > 0, snapshots are taken at multiples of this interval instead of
  /// every `snapshot_stride` steps; steps are shortened to land on them.
  double snapshot_interval = 0.0;
  double positivity_tolerance = 1e-10;
  std::size_t max_steps = 100'000'000;

  void validate() const;
};

/// Fixed step: dt_min = dt_initial = dt_max and no reaction cap.
SolverConfig fixed_step_config(double dt, DiffusionScheme scheme = DiffusionScheme::backward_euler);

class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PositivityViolation : public std::runtime_error {
 public:
  PositivityViolation(std::size_t species, std::size_t node, double value);
  std::size_t species;
  std::size_t node;
  double value;
};

/// Tridiagonal solve by forward elimination and back substitution.
/// `lower` and `upper` have n-1 entries (lower[k] couples row k+1 to k).
/// Throws StepFailure on a zero pivot.
std::vector<double> thomas_solve(std::span<const double> lower, std::span<const double> diag,
                                 std::span<const double> upper, std::span<const double> rhs);

/// Neumann ghost-point second difference: the mirror condition u_{-1} = u_1
/// gives (2u_1 - 2u_0)/h^2 at x = 0 and likewise at x = L.
Field neumann_laplacian(const Field& u);

/// One IMEX step: implicit diffusion, explicit reaction at t_n.
/// Crank-Nicolson uses a backward-Euler predictor and the trapezoidal
/// average of the reaction at t_n and t_{n+1}.
/// Throws PositivityViolation, ReactionOverflow or StepFailure.
StateVector step_imex(const ReactionSystem& sys, const StateVector& state, double dt,
                      const SolverConfig& cfg);

struct BlowUp {
  double time = 0.0;
  std::size_t species = 0;
  double norm = 0.0;
};

/// Flag when some species has sup norm above `threshold` or a non-finite entry.
std::optional<BlowUp> detect_blowup(const StateVector& state, double threshold);

enum class Termination { completed, blown_up, step_failure };

std::string to_string(Termination t);

struct Trajectory {
  std::vector<StateVector> snapshots;
  std::vector<double> dt_history;
  std::vector<double> diffusion;  // copied from the system, needed for w = sum d_i u_i
  Termination termination = Termination::completed;
  std::optional<BlowUp> blowup;
  std::string failure_reason;
  std::size_t rejected_steps = 0;

  const Grid1D& grid() const { return snapshots.front().grid(); }
  double start_time() const { return snapshots.front().time; }
  double end_time() const { return snapshots.back().time; }
  std::vector<double> times() const;
};

/// Adaptive IMEX integration from u0.time up to the absolute time `final_time`.
Trajectory simulate(const ReactionSystem& sys, const StateVector& u0, double final_time,
                    const SolverConfig& cfg);

}  // namespace rdv
