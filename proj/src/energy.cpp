#include "rdv/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdv/random.hpp"

namespace rdv {

namespace {

void enumerate_into(std::size_t m, int remaining, MultiIndex& current, std::vector<MultiIndex>& out) {
  const std::size_t pos = current.size();
  if (pos + 1 == m) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int b = 0; b <= remaining; ++b) {
    current.push_back(b);
    enumerate_into(m, remaining - b, current, out);
    current.pop_back();
  }
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
  return r;
}

}  // namespace

std::vector<MultiIndex> enumerate_multiindices(std::size_t m, int p) {
  if (m == 0) throw std::invalid_argument("enumerate_multiindices: m must be >= 1");
  if (p < 0) throw std::invalid_argument("enumerate_multiindices: p must be >= 0");
  std::vector<MultiIndex> out;
  MultiIndex current;
  current.reserve(m);
  enumerate_into(m, p, current, out);
  return out;
}

std::uint64_t multinomial(int p, const MultiIndex& beta) {
  if (p < 0 || p > kMaxEnergyExponent) throw std::invalid_argument("multinomial: p must lie in [0, 20]");
  int remaining = p;
  std::uint64_t result = 1;
  for (int b : beta) {
    if (b < 0 || b > remaining) throw std::invalid_argument("multinomial: entries must be >= 0 and sum to p");
    result *= binomial(remaining, b);
    remaining -= b;
  }
  if (remaining != 0) throw std::invalid_argument("multinomial: entries must sum to p");
  return result;
}

EnergyWeights::EnergyWeights(std::size_t m, int p, std::vector<double> theta)
    : m_(m), p_(p), theta_(std::move(theta)) {
  if (p < 1 || p > kMaxEnergyExponent) throw std::invalid_argument("energy: p must lie in [1, 20]");
  if (theta_.size() != m) throw std::invalid_argument("energy: theta must have one entry per species");
  for (double t : theta_) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("energy: theta must be positive");
  }
  indices_ = enumerate_multiindices(m, p);
  weights_.reserve(indices_.size());
  for (const auto& beta : indices_) {
    double w = static_cast<double>(multinomial(p, beta));
    for (std::size_t i = 0; i < m; ++i) w *= std::pow(theta_[i], static_cast<double>(beta[i] * beta[i]));
    if (!std::isfinite(w) || w == 0.0) throw std::overflow_error("energy: weight out of double range");
    weights_.push_back(w);
  }
}

double EnergyWeights::density(std::span<const double> v) const {
  // powers[i][k] = v_i^k by repeated multiplication
  std::vector<double> powers(m_ * static_cast<std::size_t>(p_ + 1));
  for (std::size_t i = 0; i < m_; ++i) {
    double acc = 1.0;
    for (int k = 0; k <= p_; ++k) {
      powers[i * static_cast<std::size_t>(p_ + 1) + static_cast<std::size_t>(k)] = acc;
      acc *= v[i];
    }
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < indices_.size(); ++b) {
    double term = weights_[b];
    for (std::size_t i = 0; i < m_; ++i) {
      term *= powers[i * static_cast<std::size_t>(p_ + 1) + static_cast<std::size_t>(indices_[b][i])];
    }
    sum += term;
  }
  return sum;
}

double lp_energy(const StateVector& state, const EnergyWeights& weights) {
  if (state.species_count() != weights.species_count()) {
    throw std::invalid_argument("lp_energy: species count mismatch");
  }
  if (!state.nonnegative()) throw std::invalid_argument("lp_energy: state must be nonnegative");
  const Grid1D& grid = state.grid();
  std::vector<double> v(weights.species_count());
  std::vector<double> dens(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = state.species[i][k];
    dens[k] = weights.density(v);
  }
  double e = 0.0;
  try {
    e = integrate(Field(grid, std::move(dens)));
  } catch (const std::invalid_argument&) {
    throw std::overflow_error("lp_energy: energy density overflowed");
  }
  if (!std::isfinite(e)) throw std::overflow_error("lp_energy: energy overflowed");
  return e;
}

double lp_energy(const StateVector& state, int p, const std::vector<double>& theta) {
  return lp_energy(state, EnergyWeights(state.species_count(), p, theta));
}

double norm_ratio(const StateVector& state, const EnergyWeights& weights) {
  const double e = lp_energy(state, weights);
  double norms = 0.0;
  for (const auto& f : state.species) {
    const double n = lp_norm(f, weights.exponent());
    norms += std::pow(n, weights.exponent());
  }
  if (norms == 0.0) return 0.0;
  return e / norms;
}

namespace {

double pointwise_ratio(const EnergyWeights& w, std::span<const double> v) {
  double denom = 0.0;
  for (double x : v) denom += std::pow(x, w.exponent());
  return w.density(v) / denom;
}

/// Pairwise mass transfers on the simplex with shrinking step; sign = +1
/// maximises, -1 minimises.
void polish(const EnergyWeights& w, std::vector<double>& v, double sign) {
  const std::size_t m = v.size();
  double best = sign * pointwise_ratio(w, v);
  std::vector<double> trial(m);
  for (double step = 0.125; step > 1e-9; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (i == j) continue;
          const double move = std::min(step, v[j]);
          if (move <= 0.0) continue;
          trial = v;
          trial[i] += move;
          trial[j] -= move;
          const double r = sign * pointwise_ratio(w, trial);
          if (r > best) {
            best = r;
            v = trial;
            improved = true;
          }
        }
      }
    }
  }
}

}  // namespace

NormEquivalence norm_equivalence_lambda(std::size_t m, int p, const std::vector<double>& theta,
                                        std::size_t sample_count, std::uint64_t seed) {
  const EnergyWeights w(m, p, theta);
  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> e(m, 0.0);
    e[i] = 1.0;
    points.push_back(std::move(e));
  }
  points.emplace_back(m, 1.0 / static_cast<double>(m));
  Rng rng(seed);
  for (std::size_t s = 0; s < sample_count; ++s) {
    std::vector<double> v(m);
    double total = 0.0;
    for (auto& x : v) {
      x = -std::log(1.0 - rng.uniform());
      total += x;
    }
    for (auto& x : v) x /= total;
    points.push_back(std::move(v));
  }

  std::size_t arg_lo = 0, arg_hi = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double r = pointwise_ratio(w, points[k]);
    if (r < lo) {
      lo = r;
      arg_lo = k;
    }
    if (r > hi) {
      hi = r;
      arg_hi = k;
    }
  }
  if (m > 1) {
    auto v = points[arg_lo];
    polish(w, v, -1.0);
    lo = std::min(lo, pointwise_ratio(w, v));
    v = points[arg_hi];
    polish(w, v, 1.0);
    hi = std::max(hi, pointwise_ratio(w, v));
  }
  return NormEquivalence{lo, hi};
}

EnergyMonitor energy_dissipation_monitor(const Trajectory& traj, int p, const std::vector<double>& theta,
                                         double r, double alpha) {
  if (traj.snapshots.size() < 3) throw std::invalid_argument("energy monitor: need at least 3 snapshots");
  if (!(r >= 1.0)) throw std::invalid_argument("energy monitor: r must be >= 1");
  const EnergyWeights w(traj.snapshots.front().species_count(), p, theta);
  const std::size_t count = traj.snapshots.size();
  std::vector<double> energy(count);
  for (std::size_t k = 0; k < count; ++k) energy[k] = lp_energy(traj.snapshots[k], w);

  EnergyMonitor out;
  out.sup_ratio = -std::numeric_limits<double>::infinity();
  const double half_p = 0.5 * p;
  const double source_exp = p - 1.0 + r;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const StateVector& s = traj.snapshots[k];
    EnergySample e;
    e.t = s.time;
    e.energy = energy[k];
    e.denergy_dt = (energy[k + 1] - energy[k - 1]) / (traj.snapshots[k + 1].time - traj.snapshots[k - 1].time);
    e.rhs_term = 1.0;
    for (const auto& u : s.species) {
      std::vector<double> a(u.size()), b(u.size());
      for (std::size_t n = 0; n < u.size(); ++n) {
        const double x = std::max(0.0, u[n]);
        a[n] = std::pow(x, half_p);
        b[n] = std::pow(x, source_exp);
      }
      const Field da = derivative(Field(u.grid(), std::move(a)));
      std::vector<double> sq(da.size());
      for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = da[n] * da[n];
      e.grad_term += integrate(Field(u.grid(), std::move(sq)));
      e.rhs_term += integrate(Field(u.grid(), std::move(b)));
    }
    e.ratio = (e.denergy_dt + alpha * e.grad_term) / e.rhs_term;
    out.sup_ratio = std::max(out.sup_ratio, e.ratio);
    out.samples.push_back(e);
  }
  return out;
}

std::vector<double> spacetime_l2(const Trajectory& traj, double tau, double T) {
  if (traj.snapshots.empty()) throw std::invalid_argument("spacetime_l2: empty trajectory");
  const double t0 = traj.start_time(), t1 = traj.end_time();
  const double tol = 1e-12 * std::max(1.0, std::abs(t1));
  if (!(tau < T) || tau < t0 - tol || T > t1 + tol) throw std::invalid_argument("spacetime_l2: invalid window");
  const std::size_t m = traj.snapshots.front().species_count();
  const std::size_t count = traj.snapshots.size();
  std::vector<std::vector<double>> sq(m, std::vector<double>(count));
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      const double n = lp_norm(traj.snapshots[k].species[i], 2.0);
      sq[i][k] = n * n;
    }
  }
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double a = traj.snapshots[k].time, b = traj.snapshots[k + 1].time;
    const double s = std::max(a, tau), e = std::min(b, T);
    if (!(e > s) || !(b > a)) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double slope = (sq[i][k + 1] - sq[i][k]) / (b - a);
      const double vs = sq[i][k] + slope * (s - a);
      const double ve = sq[i][k] + slope * (e - a);
      out[i] += 0.5 * (e - s) * (vs + ve);
    }
  }
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

}  // namespace rdv
