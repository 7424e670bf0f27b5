#include "rdv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdv {

void SolverConfig::validate() const {
  if (!(dt_initial > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (!(dt_min > 0.0) || !(dt_min <= dt_initial) || !(dt_initial <= dt_max)) {
    throw std::invalid_argument("solver: need 0 < dt_min <= dt <= dt_max");
  }
  if (!(cfl_reaction > 0.0)) throw std::invalid_argument("solver: cfl_reaction must be positive");
  if (snapshot_stride < 1) throw std::invalid_argument("solver: snapshot_stride must be >= 1");
  if (snapshot_interval < 0.0) throw std::invalid_argument("solver: snapshot_interval < 0");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("solver: blowup_threshold <= 0");
  if (!(positivity_tolerance >= 0.0)) {
    throw std::invalid_argument("solver: positivity_tolerance < 0");
  }
}

SolverConfig fixed_step_config(double dt, DiffusionScheme scheme) {
  SolverConfig cfg;
  cfg.dt_initial = cfg.dt_min = cfg.dt_max = dt;
  cfg.cfl_reaction = std::numeric_limits<double>::infinity();
  cfg.scheme = scheme;
  return cfg;
}

PositivityViolation::PositivityViolation(std::size_t species_, std::size_t node_, double value_)
    : std::runtime_error("negative value " + std::to_string(value_) + " for species " +
                         std::to_string(species_ + 1) + " at node " + std::to_string(node_)),
      species(species_),
      node(node_),
      value(value_) {}

std::vector<double> thomas_solve(std::span<const double> lower, std::span<const double> diag,
                                 std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || rhs.size() != n || lower.size() + 1 != n || upper.size() + 1 != n) {
    throw std::invalid_argument("thomas_solve: inconsistent band sizes");
  }
  std::vector<double> c(n, 0.0);
  std::vector<double> x(n);
  double pivot = diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw StepFailure("thomas_solve: zero pivot at row 0");
  if (n > 1) c[0] = upper[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (std::size_t k = 1; k < n; ++k) {
    pivot = diag[k] - lower[k - 1] * c[k - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw StepFailure("thomas_solve: zero pivot at row " + std::to_string(k));
    }
    if (k + 1 < n) c[k] = upper[k] / pivot;
    x[k] = (rhs[k] - lower[k - 1] * x[k - 1]) / pivot;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
  return x;
}

Field neumann_laplacian(const Field& u) {
  const auto v = u.values();
  const std::size_t n = v.size();
  const double inv_h2 = 1.0 / (u.grid().spacing() * u.grid().spacing());
  std::vector<double> out(n);
  out[0] = 2.0 * (v[1] - v[0]) * inv_h2;
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) * inv_h2;
  out[n - 1] = 2.0 * (v[n - 2] - v[n - 1]) * inv_h2;
  return Field(u.grid(), std::move(out));
}

namespace {

/// Solves (I - c * h^2 D2) x = rhs, where c = theta * dt * d / h^2.
std::vector<double> solve_diffusion(double c, std::span<const double> rhs) {
  const std::size_t n = rhs.size();
  std::vector<double> lower(n - 1, -c), diag(n, 1.0 + 2.0 * c), upper(n - 1, -c);
  upper.front() = -2.0 * c;
  lower.back() = -2.0 * c;
  return thomas_solve(lower, diag, upper, rhs);
}

StateVector backward_euler_step(const ReactionSystem& sys, const StateVector& state, double dt,
                                const std::vector<std::vector<double>>& reaction) {
  const Grid1D& grid = state.grid();
  const double h2 = grid.spacing() * grid.spacing();
  StateVector next{state.time + dt, {}};
  next.species.reserve(state.species_count());
  std::vector<double> rhs(grid.size());
  for (std::size_t i = 0; i < state.species_count(); ++i) {
    const auto u = state.species[i].values();
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = u[k] + dt * reaction[i][k];
    next.species.emplace_back(grid, solve_diffusion(dt * sys.diffusion()[i] / h2, rhs));
  }
  return next;
}

StateVector crank_nicolson_step(const ReactionSystem& sys, const StateVector& state, double dt,
                                const std::vector<std::vector<double>>& reaction) {
  const StateVector predictor = backward_euler_step(sys, state, dt, reaction);
  std::vector<std::vector<double>> reaction_next;
  evaluate_reactions_into(sys, predictor, reaction_next);

  const Grid1D& grid = state.grid();
  const std::size_t n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  StateVector next{state.time + dt, {}};
  next.species.reserve(state.species_count());
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < state.species_count(); ++i) {
    const double c = 0.5 * dt * sys.diffusion()[i] / h2;
    const auto u = state.species[i].values();
    rhs[0] = u[0] + 2.0 * c * (u[1] - u[0]);
    for (std::size_t k = 1; k + 1 < n; ++k) rhs[k] = u[k] + c * (u[k - 1] - 2.0 * u[k] + u[k + 1]);
    rhs[n - 1] = u[n - 1] + 2.0 * c * (u[n - 2] - u[n - 1]);
    for (std::size_t k = 0; k < n; ++k) rhs[k] += 0.5 * dt * (reaction[i][k] + reaction_next[i][k]);
    next.species.emplace_back(grid, solve_diffusion(c, rhs));
  }
  return next;
}

}  // namespace

StateVector step_imex(const ReactionSystem& sys, const StateVector& state, double dt,
                      const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_imex: dt must be positive");
  for (const auto& f : state.species) {
    if (!f.all_finite()) throw std::invalid_argument("step_imex: non-finite state");
  }
  std::vector<std::vector<double>> reaction;
  evaluate_reactions_into(sys, state, reaction);
  StateVector next = cfg.scheme == DiffusionScheme::crank_nicolson
                         ? crank_nicolson_step(sys, state, dt, reaction)
                         : backward_euler_step(sys, state, dt, reaction);

  const double floor = -cfg.positivity_tolerance * (1.0 + next.max_norm());
  for (std::size_t i = 0; i < next.species_count(); ++i) {
    const auto v = next.species[i].values();
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] < floor) throw PositivityViolation(i, k, v[k]);
    }
  }
  return next;
}

std::optional<BlowUp> detect_blowup(const StateVector& state, double threshold) {
  std::optional<BlowUp> worst;
  for (std::size_t i = 0; i < state.species_count(); ++i) {
    double norm = 0.0;
    for (double v : state.species[i].values()) {
      if (!std::isfinite(v)) {
        norm = std::numeric_limits<double>::infinity();
        break;
      }
      norm = std::max(norm, std::abs(v));
    }
    if (norm > threshold && (!worst || norm > worst->norm)) worst = BlowUp{state.time, i, norm};
  }
  return worst;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blown_up: return "blown_up";
    case Termination::step_failure: return "step_failure";
  }
  return "unknown";
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.time);
  return t;
}

Trajectory simulate(const ReactionSystem& sys, const StateVector& u0, double final_time,
                    const SolverConfig& cfg) {
  cfg.validate();
  if (u0.species_count() != sys.species_count()) {
    throw std::invalid_argument("simulate: initial state has wrong species count");
  }
  if (!u0.nonnegative(cfg.positivity_tolerance)) {
    throw std::invalid_argument("simulate: initial data must be nonnegative");
  }
  for (const auto& f : u0.species) {
    if (!f.all_finite()) throw std::invalid_argument("simulate: initial data must be finite");
  }
  if (!(final_time > u0.time)) throw std::invalid_argument("simulate: final time must exceed t0");

  Trajectory traj;
  traj.diffusion = sys.diffusion();
  traj.snapshots.push_back(u0);

  const double t0 = u0.time;
  const double time_tol = 1e-12 * std::max(1.0, std::abs(final_time));
  StateVector state = u0;
  double dt_current = cfg.dt_initial;
  std::size_t clean_steps = 0;
  std::size_t accepted = 0;
  std::size_t next_output_index = 1;
  auto next_output = [&]() {
    return cfg.snapshot_interval > 0.0
               ? std::min(final_time, t0 + static_cast<double>(next_output_index) * cfg.snapshot_interval)
               : final_time;
  };

  if (auto b = detect_blowup(state, cfg.blowup_threshold)) {
    traj.termination = Termination::blown_up;
    traj.blowup = b;
    return traj;
  }

  while (final_time - state.time > time_tol) {
    if (accepted + traj.rejected_steps >= cfg.max_steps) {
      traj.termination = Termination::step_failure;
      traj.failure_reason = "step budget exhausted";
      break;
    }
    const double target = next_output();
    double dt = std::min({dt_current, cfg.dt_max, target - state.time});
    const double jac = reaction_jacobian_norm(sys, state);
    if (std::isfinite(cfg.cfl_reaction) && jac > 0.0) dt = std::min(dt, cfg.cfl_reaction / jac);
    const bool lands_on_target = dt >= target - state.time - time_tol;

    StateVector next;
    try {
      next = step_imex(sys, state, dt, cfg);
    } catch (const std::exception& e) {
      ++traj.rejected_steps;
      clean_steps = 0;
      dt_current = 0.5 * dt;
      if (dt_current < cfg.dt_min) {
        traj.termination = Termination::step_failure;
        traj.failure_reason = std::string("dt fell below dt_min: ") + e.what();
        break;
      }
      continue;
    }
    if (lands_on_target) next.time = target;

    traj.dt_history.push_back(dt);
    ++accepted;
    state = std::move(next);
    if (++clean_steps >= 10) {
      dt_current = std::min(1.2 * dt_current, cfg.dt_max);
      clean_steps = 0;
    }

    if (auto b = detect_blowup(state, cfg.blowup_threshold)) {
      traj.termination = Termination::blown_up;
      traj.blowup = b;
      traj.snapshots.push_back(state);
      return traj;
    }

    bool record = false;
    if (cfg.snapshot_interval > 0.0) {
      if (lands_on_target) {
        record = true;
        ++next_output_index;
      }
    } else {
      record = accepted % cfg.snapshot_stride == 0;
    }
    if (record) traj.snapshots.push_back(state);
  }

  if (traj.snapshots.back().time < state.time) traj.snapshots.push_back(state);
  return traj;
}

}  // namespace rdv
