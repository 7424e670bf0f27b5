#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rdv/energy.hpp"
#include "rdv/initial_data.hpp"
#include "test_support.hpp"

using namespace rdv;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector random_state(const Grid1D& g, std::size_t m, std::uint64_t seed) {
  std::vector<Field> species;
  for (std::size_t j = 0; j < m; ++j) species.push_back(test::random_field(g, seed * 31 + j, 0.0, 2.0));
  return make_state(0.0, std::move(species));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

SolverConfig every(double interval, double dt) {
  SolverConfig c = fixed_step_config(dt);
  c.snapshot_interval = interval;
  return c;
}

}  // namespace

TEST(Energy, EnumerationExamples) {
  EXPECT_EQ(enumerate_multiindices(1, 5), (std::vector<MultiIndex>{{5}}));
  EXPECT_EQ(enumerate_multiindices(2, 2), (std::vector<MultiIndex>{{0, 2}, {1, 1}, {2, 0}}));
  EXPECT_EQ(enumerate_multiindices(3, 2).size(), 6u);
  EXPECT_EQ(enumerate_multiindices(2, 0), (std::vector<MultiIndex>{{0, 0}}));
}

TEST(Energy, EnumerationCountsAndSums) {
  for (std::size_t m = 1; m <= 5; ++m) {
    for (int p = 0; p <= 8; ++p) {
      const auto idx = enumerate_multiindices(m, p);
      EXPECT_EQ(idx.size(), binomial(p + m - 1, m - 1));
      std::uint64_t total = 0;
      for (const auto& b : idx) {
        int s = 0;
        for (int v : b) {
          EXPECT_GE(v, 0);
          s += v;
        }
        EXPECT_EQ(s, p);
        total += multinomial(p, b);
      }
      // sum of multinomials = m^p
      EXPECT_EQ(total, static_cast<std::uint64_t>(std::llround(std::pow(m, p))));
    }
  }
}

TEST(Energy, MultinomialIsExact) {
  EXPECT_EQ(multinomial(4, {2, 2}), 6u);
  EXPECT_EQ(multinomial(20, {10, 10}), 184756u);
  EXPECT_EQ(multinomial(20, {1, 1, 1, 17}), 6840u);
  EXPECT_EQ(multinomial(20, {20}), 1u);
  EXPECT_THROW(multinomial(21, {21}), std::invalid_argument);
  EXPECT_THROW(multinomial(3, {1, 1}), std::invalid_argument);
}

TEST(Energy, LpEnergyExamples) {
  Grid1D g(1.0, 101);
  EXPECT_NEAR(lp_energy(constant_state(g, {1.0}), 2, {1.0}), 1.0, 1e-14);
  EXPECT_NEAR(lp_energy(constant_state(g, {1.0, 1.0}), 2, {2.0, 1.0}), 21.0, 1e-12);
  const auto s = random_state(g, 2, 3);
  const Field sum = s.species[0] + s.species[1];
  std::vector<double> sq(g.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = sum[k] * sum[k];
  EXPECT_NEAR(lp_energy(s, 2, {1.0, 1.0}), integrate(Field(g, sq)), 1e-12);
}

TEST(Energy, MultinomialCollapseOnRandomStates) {
  Grid1D g(1.0, 201);
  for (int p : {2, 3, 4}) {
    for (std::size_t m : {1u, 2u, 3u}) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = random_state(g, m, seed);
        std::vector<double> pw(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
          double z = 0.0;
          for (const auto& f : s.species) z += f[k];
          pw[k] = std::pow(z, p);
        }
        const double expected = integrate(Field(g, pw));
        EXPECT_NEAR(lp_energy(s, p, std::vector<double>(m, 1.0)), expected, 1e-12 * expected);
      }
    }
  }
}

TEST(Energy, WeightsOverflowIsReported) {
  EXPECT_THROW(EnergyWeights(2, 20, {1e30, 1.0}), std::overflow_error);
  EXPECT_THROW(EnergyWeights(2, 21, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(EnergyWeights(2, 2, {0.0, 1.0}), std::invalid_argument);
}

TEST(Energy, NormEquivalenceExamples) {
  auto one = norm_equivalence_lambda(1, 3, {1.0}, 200, 1);
  EXPECT_NEAR(one.lambda_low, 1.0, 1e-14);
  EXPECT_NEAR(one.lambda_high, 1.0, 1e-14);
  const auto two = norm_equivalence_lambda(2, 2, {1.0, 1.0}, 2000, 1);
  EXPECT_NEAR(two.lambda_low, 1.0, 1e-12);
  EXPECT_NEAR(two.lambda_high, 2.0, 1e-6);
  Grid1D g(1.0, 51);
  const EnergyWeights w(2, 3, {1.3, 0.7});
  auto s = random_state(g, 2, 4);
  s.species[0] = Field(g, 0.0);
  EXPECT_NEAR(norm_ratio(s, w), std::pow(0.7, 9.0), 1e-12);
}

TEST(Energy, NormEquivalenceBracketsRandomStates) {
  Grid1D g(1.0, 101);
  for (int p : {2, 3}) {
    const std::vector<double> theta = {1.5, 0.8, 1.1};
    const auto lam = norm_equivalence_lambda(3, p, theta, 4000, 7);
    ASSERT_GT(lam.lambda_low, 0.0);
    const EnergyWeights w(3, p, theta);
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      const double r = norm_ratio(random_state(g, 3, seed), w);
      EXPECT_GE(r, lam.lambda_low * (1.0 - 1e-12));
      EXPECT_LE(r, lam.lambda_high * (1.0 + 1e-12));
    }
  }
}

TEST(EnergyMonitor, ConstantHeatHasNoSource) {
  Grid1D g(1.0, 51);
  const auto traj = simulate(make_preset("heat"), constant_state(g, {2.0}), 1.0, every(0.1, 0.01));
  const auto mon = energy_dissipation_monitor(traj, 2, {1.0}, 1.0, 1.0);
  ASSERT_FALSE(mon.samples.empty());
  for (const auto& s : mon.samples) {
    EXPECT_NEAR(s.denergy_dt, 0.0, 1e-12);
    EXPECT_LE(s.grad_term, 1e-20);
    EXPECT_LE(s.ratio, 1e-12);
  }
}

TEST(EnergyMonitor, HeatEnergyIdentity) {
  // E = int u^2 and dE/dt = -2 d int |u_x|^2
  Grid1D g(1.0, 201);
  const double d = 0.5;
  const auto heat = make_preset("heat", {.diffusion = {d}});
  const auto traj = simulate(heat, cosine_state(g, 1, 1.0, 1.0), 0.2, every(0.002, 2e-5));
  const auto mon = energy_dissipation_monitor(traj, 2, {1.0}, 1.0, 2.0 * d);
  for (const auto& s : mon.samples) {
    EXPECT_NEAR(s.denergy_dt + 2.0 * d * s.grad_term, 0.0, 0.02 * std::abs(s.denergy_dt));
    EXPECT_LE(s.ratio, 0.02 * std::abs(s.denergy_dt));
  }
}

TEST(EnergyMonitor, PureHeatRatioIsNonPositive) {
  Grid1D g(1.0, 101);
  const auto traj = simulate(make_preset("heat", {.species_count = 2}), random_cosine_state(g, 2, 2.0, 6, 3), 1.0,
                             every(0.01, 1e-3));
  const auto mon = energy_dissipation_monitor(traj, 2, {1.0, 1.0}, 1.0, 1.0);
  for (const auto& s : mon.samples) EXPECT_LE(s.ratio, 1e-3);
}

TEST(EnergyMonitor, NeedsThreeSnapshots) {
  Grid1D g(1.0, 11);
  const auto traj = simulate(make_preset("heat"), constant_state(g, {1.0}), 1.0, every(1.0, 0.1));
  EXPECT_THROW(energy_dissipation_monitor(traj, 2, {1.0}, 1.0, 1.0), std::invalid_argument);
}

TEST(SpacetimeL2, Examples) {
  Grid1D g(1.0, 101);
  const auto zero = simulate(make_preset("heat"), constant_state(g, {0.0}), 1.0, every(0.1, 0.01));
  EXPECT_EQ(spacetime_l2(zero, 0.0, 1.0)[0], 0.0);
  const auto one = simulate(make_preset("heat"), constant_state(g, {1.0}), 1.0, every(0.1, 0.01));
  EXPECT_NEAR(spacetime_l2(one, 0.0, 1.0)[0], 1.0, 1e-12);
  EXPECT_NEAR(spacetime_l2(one, 0.25, 0.6)[0], std::sqrt(0.35), 1e-12);
  EXPECT_THROW(spacetime_l2(one, 0.6, 0.25), std::invalid_argument);
  EXPECT_THROW(spacetime_l2(one, 0.0, 2.0), std::invalid_argument);
}

TEST(SpacetimeL2, HeatCosineModeMatchesClosedForm) {
  // u = 1 + e^{-pi^2 t} cos(pi x): ||u||_2^2 = 1 + e^{-2 pi^2 t} / 2
  Grid1D g(1.0, 401);
  const double T = 0.3;
  const auto traj = simulate(make_preset("heat"), cosine_state(g, 1, 1.0, 1.0), T, every(0.001, 1e-5));
  const double exact = T + (1.0 - std::exp(-2.0 * kPi * kPi * T)) / (4.0 * kPi * kPi);
  EXPECT_NEAR(spacetime_l2(traj, 0.0, T)[0], std::sqrt(exact), 1e-3);
}

TEST(SpacetimeL2, GrowsWithTheWindowAndStaysBalanced) {
  Grid1D g(1.0, 101);
  for (const char* name : {"cubic_exchange", "cubic_autocatalysis"}) {
    const auto traj = simulate(make_preset(name), random_cosine_state(g, 2, 2.0, 6, 2), 5.0, [] {
      SolverConfig c;
      c.snapshot_interval = 0.05;
      return c;
    }());
    double prev = 0.0;
    for (double T = 0.5; T <= 5.0; T += 0.5) {
      const double v = spacetime_l2(traj, 0.0, T)[0];
      EXPECT_GE(v, prev);
      prev = v;
    }
    // growth of the cumulative norm over each further unit window
    for (std::size_t j = 0; j < 2; ++j) {
      double lo = INFINITY, hi = 0.0;
      for (int k = 1; k < 5; ++k) {
        const double growth = spacetime_l2(traj, 0.0, k + 1.0)[j] / spacetime_l2(traj, 0.0, k)[j];
        lo = std::min(lo, growth);
        hi = std::max(hi, growth);
      }
      EXPECT_GE(lo, 1.0);
      EXPECT_LE(hi, 2.0 * lo) << name << " species " << j;
    }
  }
}
