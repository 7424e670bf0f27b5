#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rdv/initial_data.hpp"
#include "rdv/solver.hpp"

using namespace rdv;

namespace {

constexpr double kPi = std::numbers::pi;

/// u = e^{-t} (2 + cos(pi x)) solves u_t - u_xx = e^{-t} (-2 + (pi^2 - 1) cos(pi x)).
ReactionSystem manufactured_heat() {
  SystemDefinition def;
  def.name = "manufactured";
  def.diffusion = {1.0};
  def.reaction = [](double x, double t, std::span<const double>, std::span<double> out) {
    out[0] = std::exp(-t) * (-2.0 + (kPi * kPi - 1.0) * std::cos(kPi * x));
  };
  return ReactionSystem(def);
}

double manufactured_exact(double x, double t) { return std::exp(-t) * (2.0 + std::cos(kPi * x)); }

double manufactured_error(std::size_t n, double dt, DiffusionScheme scheme, double T) {
  Grid1D g(1.0, n);
  const auto u0 = make_state(0.0, {Field::from_function(g, [](double x) { return manufactured_exact(x, 0.0); })});
  const auto traj = simulate(manufactured_heat(), u0, T, fixed_step_config(dt, scheme));
  EXPECT_EQ(traj.termination, Termination::completed);
  const auto& u = traj.snapshots.back().species[0];
  double err = 0.0;
  for (std::size_t k = 0; k < n; ++k) err = std::max(err, std::abs(u[k] - manufactured_exact(g.node(k), T)));
  return err;
}

double total_mass(const StateVector& s) {
  double m = 0.0;
  for (const auto& f : s.species) m += integrate(f);
  return m;
}

}  // namespace

TEST(Thomas, SolvesKnownSystems) {
  std::vector<double> lo{}, up{};
  auto x = thomas_solve(lo, std::vector<double>{2.0}, up, std::vector<double>{4.0});
  EXPECT_EQ(x[0], 2.0);
  // [[2,1],[1,3]] x = [3,5] -> x = (0.8, 1.4)
  x = thomas_solve(std::vector<double>{1.0}, std::vector<double>{2.0, 3.0}, std::vector<double>{1.0},
                   std::vector<double>{3.0, 5.0});
  EXPECT_NEAR(x[0], 0.8, 1e-15);
  EXPECT_NEAR(x[1], 1.4, 1e-15);
  EXPECT_THROW(thomas_solve(std::vector<double>{1.0}, std::vector<double>{0.0, 1.0}, std::vector<double>{1.0},
                            std::vector<double>{1.0, 1.0}),
               StepFailure);
}

TEST(Thomas, ResidualIsSmallOnRandomDiagonallyDominantSystems) {
  const std::size_t n = 200;
  std::vector<double> lo(n - 1), d(n), up(n - 1), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = 4.0 + std::sin(0.3 * k);
    b[k] = std::cos(0.7 * k);
    if (k + 1 < n) {
      lo[k] = -1.0 + 0.1 * std::cos(k * 1.0);
      up[k] = -1.2 + 0.1 * std::sin(k * 2.0);
    }
  }
  const auto x = thomas_solve(lo, d, up, b);
  for (std::size_t k = 0; k < n; ++k) {
    double r = d[k] * x[k] - b[k];
    if (k > 0) r += lo[k - 1] * x[k - 1];
    if (k + 1 < n) r += up[k] * x[k + 1];
    EXPECT_LT(std::abs(r), 1e-13);
  }
}

TEST(Solver, NeumannLaplacianOfConstantIsZero) {
  Grid1D g(1.0, 11);
  const Field flat = neumann_laplacian(Field(g, 5.0));
  for (double v : flat.values()) EXPECT_EQ(v, 0.0);
  const auto lap = neumann_laplacian(Field::from_function(g, [](double x) { return x * x; }));
  EXPECT_NEAR(lap[5], 2.0, 1e-10);
}

TEST(Solver, HeatKeepsConstantsFixed) {
  Grid1D g(1.0, 51);
  const auto u0 = constant_state(g, {1.0});
  for (auto scheme : {DiffusionScheme::backward_euler, DiffusionScheme::crank_nicolson}) {
    const auto one = step_imex(make_preset("heat"), u0, 0.01, fixed_step_config(0.01, scheme));
    for (double v : one.species[0].values()) EXPECT_NEAR(v, 1.0, 1e-15);
    const auto traj = simulate(make_preset("heat"), u0, 1.0, SolverConfig{});
    EXPECT_EQ(traj.termination, Termination::completed);
    EXPECT_NEAR(traj.end_time(), 1.0, 1e-12);
    for (double v : traj.snapshots.back().species[0].values()) EXPECT_NEAR(v, 1.0, 1e-13);
  }
}

TEST(Solver, HeatCosineModeDecaysAtExactRate) {
  Grid1D g(1.0, 201);
  const auto start = cosine_state(g, 1, 1.0, 1.0);
  const auto traj = simulate(make_preset("heat"), start, 0.1, fixed_step_config(1e-4));
  const auto& u = traj.snapshots.back().species[0];
  const double decay = std::exp(-kPi * kPi * 0.1);
  for (std::size_t k = 0; k < g.size(); k += 20) EXPECT_NEAR(u[k], 1.0 + decay * std::cos(kPi * g.node(k)), 5e-4);
}

TEST(Solver, SpatiallyConstantExchangeMatchesOdeReference) {
  // u1 = 2, u2 = 0 stays spatially constant; reduce to u1' = u2^3 - u1^3, u2' = -u1'.
  Grid1D g(1.0, 5);
  const auto u0 = constant_state(g, {2.0, 0.0});
  const auto traj = simulate(make_preset("cubic_exchange"), u0, 1.0, fixed_step_config(1e-5));
  ASSERT_EQ(traj.termination, Termination::completed);
  double a = 2.0, b = 0.0;
  const double h = 1e-6;
  auto rhs = [](double x, double y) { return y * y * y - x * x * x; };
  for (int k = 0; k < 1'000'000; ++k) {
    const double k1 = rhs(a, b), k2 = rhs(a + 0.5 * h * k1, b - 0.5 * h * k1);
    const double k3 = rhs(a + 0.5 * h * k2, b - 0.5 * h * k2), k4 = rhs(a + h * k3, b - h * k3);
    const double d = h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    a += d;
    b -= d;
  }
  const auto& s = traj.snapshots.back();
  EXPECT_NEAR(s.species[0][2], a, 1e-4);
  EXPECT_NEAR(s.species[1][2], b, 1e-4);
}

TEST(Solver, ExchangeConservesMass) {
  Grid1D g(1.0, 101);
  const auto u0 = random_cosine_state(g, 2, 2.0, 6, 4);
  const auto traj = simulate(make_preset("cubic_exchange"), u0, 1.0, SolverConfig{});
  ASSERT_EQ(traj.termination, Termination::completed);
  const double m0 = total_mass(u0);
  for (const auto& s : traj.snapshots) EXPECT_NEAR(total_mass(s), m0, 1e-10 * m0);
}

TEST(Solver, AutocatalysisMassIsNonIncreasing) {
  Grid1D g(1.0, 101);
  const auto u0 = random_cosine_state(g, 2, 2.0, 6, 5);
  const auto traj = simulate(make_preset("cubic_autocatalysis"), u0, 1.0, SolverConfig{});
  ASSERT_EQ(traj.termination, Termination::completed);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    EXPECT_LE(total_mass(traj.snapshots[i]), total_mass(traj.snapshots[i - 1]) + 1e-10);
  }
}

TEST(Solver, SolutionsStayNonnegative) {
  Grid1D g(1.0, 101);
  const auto u0 = spike_state(g, 2, 1.0, 0.05, 0.5);
  const auto traj = simulate(make_preset("cubic_autocatalysis"), u0, 0.5, SolverConfig{});
  for (const auto& s : traj.snapshots) EXPECT_TRUE(s.nonnegative());
}

TEST(Solver, QuadraticBlowUpTimeMatchesOde) {
  Grid1D g(1.0, 21);
  const auto u0 = constant_state(g, {10.0});
  const auto traj = simulate(make_preset("quadratic_blowup"), u0, 1.0, SolverConfig{});
  ASSERT_EQ(traj.termination, Termination::blown_up);
  ASSERT_TRUE(traj.blowup.has_value());
  EXPECT_NEAR(traj.blowup->time, 0.1, 0.02);
}

TEST(Solver, DetectBlowup) {
  Grid1D g(1.0, 5);
  auto s = make_state(0.3, {Field(g, 1.0), Field(g, 2.0)});
  EXPECT_FALSE(detect_blowup(s, 1e12));
  s.species[1][2] = 1e13;
  auto b = detect_blowup(s, 1e12);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->species, 1u);
  EXPECT_EQ(b->time, 0.3);
  s.species[1][2] = std::nan("");
  EXPECT_TRUE(detect_blowup(s, 1e12));
}

TEST(Solver, SnapshotIntervalLandsOnMultiples) {
  Grid1D g(1.0, 41);
  SolverConfig cfg;
  cfg.snapshot_interval = 0.25;
  const auto traj = simulate(make_preset("cubic_exchange"), random_cosine_state(g, 2, 2.0, 6, 1), 1.0, cfg);
  ASSERT_EQ(traj.snapshots.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(traj.snapshots[i].time, 0.25 * i, 1e-12);
}

TEST(Solver, StepBudgetEndsInStepFailure) {
  Grid1D g(1.0, 11);
  SolverConfig cfg = fixed_step_config(1e-3);
  cfg.max_steps = 10;
  const auto traj = simulate(make_preset("heat"), constant_state(g, {1.0}), 1.0, cfg);
  EXPECT_EQ(traj.termination, Termination::step_failure);
  EXPECT_FALSE(traj.failure_reason.empty());
}

TEST(Solver, RejectsBadInput) {
  Grid1D g(1.0, 11);
  EXPECT_THROW(simulate(make_preset("heat"), constant_state(g, {-1.0}), 1.0, SolverConfig{}), std::invalid_argument);
  EXPECT_THROW(simulate(make_preset("heat"), constant_state(g, {1.0}), 0.0, SolverConfig{}), std::invalid_argument);
  EXPECT_THROW(simulate(make_preset("cubic_exchange"), constant_state(g, {1.0}), 1.0, SolverConfig{}),
               std::invalid_argument);
  SolverConfig bad;
  bad.dt_min = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Solver, NegativeSourceTriggersPositivityRejection) {
  Grid1D g(1.0, 11);
  const auto u0 = constant_state(g, {0.01});
  EXPECT_THROW(step_imex(make_preset("negative_source"), u0, 0.1, fixed_step_config(0.1)), PositivityViolation);
  const auto traj = simulate(make_preset("negative_source"), u0, 1.0, SolverConfig{});
  EXPECT_EQ(traj.termination, Termination::step_failure);
}

TEST(Solver, SpatialOrderIsTwo) {
  const double e1 = manufactured_error(21, 1e-4, DiffusionScheme::crank_nicolson, 0.5);
  const double e2 = manufactured_error(41, 1e-4, DiffusionScheme::crank_nicolson, 0.5);
  const double e3 = manufactured_error(81, 1e-4, DiffusionScheme::crank_nicolson, 0.5);
  for (double order : {std::log2(e1 / e2), std::log2(e2 / e3)}) {
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
  }
}

TEST(Solver, BackwardEulerIsFirstOrderInTime) {
  const double e1 = manufactured_error(401, 0.02, DiffusionScheme::backward_euler, 1.0);
  const double e2 = manufactured_error(401, 0.01, DiffusionScheme::backward_euler, 1.0);
  const double e3 = manufactured_error(401, 0.005, DiffusionScheme::backward_euler, 1.0);
  for (double order : {std::log2(e1 / e2), std::log2(e2 / e3)}) {
    EXPECT_GE(order, 0.8);
    EXPECT_LE(order, 1.2);
  }
}

TEST(Solver, CrankNicolsonIsSecondOrderInTime) {
  const double e1 = manufactured_error(1601, 0.04, DiffusionScheme::crank_nicolson, 1.0);
  const double e2 = manufactured_error(1601, 0.02, DiffusionScheme::crank_nicolson, 1.0);
  const double e3 = manufactured_error(1601, 0.01, DiffusionScheme::crank_nicolson, 1.0);
  for (double order : {std::log2(e1 / e2), std::log2(e2 / e3)}) {
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
  }
}

TEST(Solver, AugmentedSystemReproducesOriginal) {
  Grid1D g(1.0, 81);
  const auto sys = make_preset("cubic_autocatalysis");
  const auto u0 = random_cosine_state(g, 2, 2.0, 6, 3);
  const auto cfg = fixed_step_config(1e-3);
  const auto a = simulate(sys, u0, 1.0, cfg);
  const auto b = simulate(augment_conservative(sys), augment_state(u0), 1.0, cfg);
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(a.snapshots[i].species[j][k], b.snapshots[i].species[j][k], 1e-8);
      }
    }
  }
  const double m0 = total_mass(b.snapshots.front());
  EXPECT_NEAR(total_mass(b.snapshots.back()), m0, 1e-10 * m0);
}

TEST(Solver, RescaledRunRoundTrips) {
  Grid1D g(1.0, 81);
  const auto sys = make_preset("linear_decay");
  const double k1 = sys.k1();
  const auto u0 = random_cosine_state(g, 2, 2.0, 6, 2);
  // both runs are first order in dt, so they agree to O(dt)
  const auto cfg = fixed_step_config(1e-5);
  const auto direct = simulate(sys, u0, 0.5, cfg);
  const auto scaled = simulate(rescaled_system(sys, k1), rescale_exponential(u0, k1, RescaleDirection::forward),
                               0.5, cfg);
  const auto back = rescale_exponential(scaled.snapshots.back(), k1, RescaleDirection::inverse);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_NEAR(back.species[j][k], direct.snapshots.back().species[j][k], 1e-6);
    }
  }
}
