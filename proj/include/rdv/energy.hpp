#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rdv/solver.hpp"

namespace rdv {

using MultiIndex = std::vector<int>;

/// All beta in Z_+^m with |beta| = p, lexicographic (first entry slowest).
std::vector<MultiIndex> enumerate_multiindices(std::size_t m, int p);

/// p! / prod beta_i!, exact in 64-bit integers for p <= 20.
std::uint64_t multinomial(int p, const MultiIndex& beta);

constexpr int kMaxEnergyExponent = 20;

/// Precomputed weights multinomial(p, beta) * prod theta_i^{beta_i^2}.
/// Throws std::overflow_error if a weight is not finite.
class EnergyWeights {
 public:
  EnergyWeights(std::size_t m, int p, std::vector<double> theta);

  std::size_t species_count() const { return m_; }
  int exponent() const { return p_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const std::vector<double>& weights() const { return weights_; }

  /// sum_beta w_beta prod v_i^{beta_i} at one point.
  double density(std::span<const double> v) const;

 private:
  std::size_t m_;
  int p_;
  std::vector<double> theta_;
  std::vector<MultiIndex> indices_;
  std::vector<double> weights_;
};

/// E_p[u] = sum_beta multinomial(p, beta) theta^{beta^2} int prod u_i^{beta_i}.
double lp_energy(const StateVector& state, int p, const std::vector<double>& theta);
double lp_energy(const StateVector& state, const EnergyWeights& weights);

struct NormEquivalence {
  double lambda_low = 0.0;   // min of E_p / sum ||u_i||_p^p
  double lambda_high = 0.0;  // max of the same ratio
};

/// The ratio E_p[u] / sum_i ||u_i||_p^p is a weighted average of the pointwise
/// ratio P(v) / sum v_i^p, which is homogeneous of degree 0. Its extremes over
/// the simplex (vertices, seeded random points, then a local search) bracket
/// the field ratio for every nonnegative state.
NormEquivalence norm_equivalence_lambda(std::size_t m, int p, const std::vector<double>& theta,
                                        std::size_t sample_count, std::uint64_t seed);

/// E_p[u] / sum_i ||u_i||_p^p for one state; 0/0 gives 0.
double norm_ratio(const StateVector& state, const EnergyWeights& weights);

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;
  double denergy_dt = 0.0;
  double grad_term = 0.0;  // sum_i int |d/dx (u_i^{p/2})|^2
  double rhs_term = 0.0;   // 1 + sum_i int u_i^{p-1+r}
  double ratio = 0.0;      // (dE/dt + alpha * grad_term) / rhs_term
};

struct EnergyMonitor {
  std::vector<EnergySample> samples;  // interior snapshots only
  double sup_ratio = 0.0;
};

/// Needs at least 3 snapshots; dE/dt by centred differences over snapshots.
EnergyMonitor energy_dissipation_monitor(const Trajectory& traj, int p, const std::vector<double>& theta,
                                         double r, double alpha);

/// Per species sqrt(int_tau^T ||u_i(t)||_2^2 dt), trapezoid in time over the
/// snapshots with linear interpolation at the window ends.
std::vector<double> spacetime_l2(const Trajectory& traj, double tau, double T);

}  // namespace rdv
