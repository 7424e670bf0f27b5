// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status
// is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rdv/energy.hpp"
#include "rdv/inequalities.hpp"
#include "rdv/initial_data.hpp"
#include "rdv/morrey.hpp"
#include "rdv/solver.hpp"
#include "test_support.hpp"

using namespace rdv;

namespace {

// Tolerances.
constexpr double kMassConservation = 1e-10;
constexpr double kMassMonotone = 1e-10;
constexpr double kSupAgreement = 0.05;
constexpr double kNonConcentration = 1.25;
constexpr double kLocalizedMassSpread = 0.25;
constexpr double kHolderAccuracy = 0.05;
constexpr double kMorreyConstant = 0.02;
constexpr double kMorreySpike = 0.05;
constexpr double kSubadditivity = 1e-12;
constexpr double kSafetyFactor = 1.5;
constexpr double kScaleInvariance = 1e-10;
constexpr double kCollapse = 1e-12;
constexpr double kMonitorStability = 0.20;
constexpr double kAugmentation = 1e-8;
constexpr double kRescaling = 1e-6;
constexpr double kXiBoundary = 1e-10;
constexpr double kBlowupTime = 0.20;

// Runtime budgets in seconds.
constexpr double kBudgetMass = 60.0;
constexpr double kBudgetBoundedness = 600.0;
constexpr double kBudgetHolder = 10.0;
constexpr double kBudgetInequalities = 120.0;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double total_mass(const StateVector& s) {
  double m = 0.0;
  for (const auto& f : s.species) m += integrate(f);
  return m;
}

double sup_linf(const Trajectory& traj) {
  double s = 0.0;
  for (const auto& snap : traj.snapshots) s = std::max(s, snap.max_norm());
  return s;
}

SolverConfig desk_solver() {
  SolverConfig c;
  c.snapshot_interval = 0.05;
  return c;
}

Field total_density(const StateVector& s) {
  Field z(s.grid(), 0.0);
  for (const auto& f : s.species) z += f;
  return z;
}

const StateVector& snapshot_at(const Trajectory& traj, double t) {
  for (const auto& s : traj.snapshots) {
    if (std::abs(s.time - t) < 1e-9) return s;
  }
  throw std::runtime_error("no snapshot at t=" + std::to_string(t));
}

// Desk runs shared by criteria 2, 3, 4 and 8: preset x seed x resolution.
struct DeskRun {
  std::string preset;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  Trajectory traj;
};

std::vector<DeskRun>& desk_runs() {
  static std::vector<DeskRun> runs;
  return runs;
}

double desk_run_seconds = 0.0;

void build_desk_runs() {
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* preset : {"cubic_exchange", "cubic_autocatalysis"}) {
    const auto sys = make_preset(preset, {.diffusion = {1.0, 0.1}});
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      for (std::size_t n : {401u, 801u}) {
        Grid1D g(1.0, n);
        desk_runs().push_back({preset, seed, n, simulate(sys, random_cosine_state(g, 2, 2.0, 6, seed), 10.0,
                                                         desk_solver())});
      }
    }
  }
  desk_run_seconds = seconds_since(t0);
}

const DeskRun& find_run(const std::string& preset, std::uint64_t seed, std::size_t n) {
  for (const auto& r : desk_runs()) {
    if (r.preset == preset && r.seed == seed && r.nodes == n) return r;
  }
  throw std::runtime_error("missing desk run");
}

HolderEstimate holder_of(const Trajectory& traj) {
  return estimate_holder(auxiliary_fields(traj, traj.start_time()).y);
}

// 1
Outcome conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  Grid1D g(1.0, 401);
  SolverConfig every_step;  // stride 1: every accepted step is recorded
  const auto ex = simulate(make_preset("cubic_exchange"), random_cosine_state(g, 2, 2.0, 6, 1), 10.0, every_step);
  const double m0 = total_mass(ex.snapshots.front());
  double drift = 0.0;
  for (const auto& s : ex.snapshots) drift = std::max(drift, std::abs(total_mass(s) - m0) / m0);

  const auto ac =
      simulate(make_preset("cubic_autocatalysis"), random_cosine_state(g, 2, 2.0, 6, 1), 10.0, every_step);
  double rise = 0.0;
  for (std::size_t i = 1; i < ac.snapshots.size(); ++i) {
    rise = std::max(rise, total_mass(ac.snapshots[i]) - total_mass(ac.snapshots[i - 1]));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ex.termination == Termination::completed && ac.termination == Termination::completed &&
           drift <= kMassConservation && rise <= kMassMonotone && secs < kBudgetMass;
  o.detail = fmt("exchange max relative drift %.2e over %zu steps; autocatalysis max per-step rise %.2e over %zu "
                 "steps; %.1fs",
                 drift, ex.snapshots.size() - 1, rise, ac.snapshots.size() - 1, secs);
  return o;
}

// 2
Outcome boundedness() {
  std::size_t blowups = 0, incomplete = 0;
  double worst = 0.0, worst_final = 0.0;
  std::string worst_run;
  for (const char* preset : {"cubic_exchange", "cubic_autocatalysis"}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto& a = find_run(preset, seed, 401);
      const auto& b = find_run(preset, seed, 801);
      for (const auto* r : {&a, &b}) {
        if (r->traj.blowup) ++blowups;
        if (r->traj.termination != Termination::completed) ++incomplete;
      }
      const double dev = std::abs(sup_linf(a.traj) / sup_linf(b.traj) - 1.0);
      worst_final = std::max(
          worst_final, std::abs(a.traj.snapshots.back().max_norm() / b.traj.snapshots.back().max_norm() - 1.0));
      if (dev > worst) {
        worst = dev;
        worst_run = fmt("%s seed %llu", preset, static_cast<unsigned long long>(seed));
      }
    }
  }
  Outcome o;
  o.pass = blowups == 0 && incomplete == 0 && worst <= kSupAgreement && desk_run_seconds < kBudgetBoundedness;
  o.detail = fmt("40 runs, %zu blow-ups, %zu incomplete; worst sup-norm mismatch n=401 vs 801 %.2f%% (%s), "
                 "at t=10 %.2f%%; %.1fs",
                 blowups, incomplete, 100.0 * worst, worst_run.c_str(), 100.0 * worst_final, desk_run_seconds);
  return o;
}

// 3
Outcome nonconcentration() {
  double worst = 0.0, gmin = 1.0, gmax = 0.0;
  std::string worst_run;
  for (const auto& r : desk_runs()) {
    const auto h = holder_of(r.traj);
    gmin = std::min(gmin, h.gamma);
    gmax = std::max(gmax, h.gamma);
    MorreyParams p;
    p.delta = delta_from_gamma(h.gamma);
    const double ratio = track_morrey(r.traj, p).nonconcentration_ratio;
    if (ratio > worst) {
      worst = ratio;
      worst_run = fmt("%s seed %llu n=%zu", r.preset.c_str(), static_cast<unsigned long long>(r.seed), r.nodes);
    }
  }
  Outcome o;
  o.pass = worst <= kNonConcentration;
  o.detail = fmt("40 runs, gamma in [%.3f, %.3f]; worst late/early Morrey ratio %.4f (%s)", gmin, gmax, worst,
                 worst_run.c_str());
  return o;
}

// 4
Outcome localized_mass_scaling() {
  double worst = 0.0;
  std::string worst_run;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto& r = find_run("cubic_exchange", seed, 401);
    const double delta = delta_from_gamma(holder_of(r.traj).gamma);
    const Grid1D& g = r.traj.grid();
    std::vector<double> k_of_t;
    for (double T : {1.0, 5.0, 10.0}) {
      const Field z = total_density(snapshot_at(r.traj, T));
      double k = 0.0;
      for (int j = 2; j <= 6; ++j) {
        const double eps = g.length() / std::exp2(j);
        for (std::size_t c = 0; c < g.size(); ++c) {
          const auto phi = make_cutoff(g, eps, g.node(c), 1.0 / 3.0);
          k = std::max(k, localized_mass(z, phi) / std::pow(eps, delta));
        }
      }
      k_of_t.push_back(k);
    }
    const auto [lo, hi] = std::minmax_element(k_of_t.begin(), k_of_t.end());
    const double spread = *hi / *lo - 1.0;
    if (spread > worst) {
      worst = spread;
      worst_run = fmt("seed %llu, K = %.4f / %.4f / %.4f", static_cast<unsigned long long>(seed), k_of_t[0],
                      k_of_t[1], k_of_t[2]);
    }
  }
  Outcome o;
  o.pass = worst <= kLocalizedMassSpread;
  o.detail = fmt("cubic_exchange, 10 seeds, eps in {L/4..L/64}: worst K spread over T in {1,5,10} %.2f%% (%s)",
                 100.0 * worst, worst_run.c_str());
  return o;
}

// 5
Outcome holder_accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  HolderOptions opts;
  opts.pair_count = 100'000;
  opts.seed = 1;
  struct Case {
    std::string name;
    double exponent;
    SpaceTimeArray field;
  };
  std::vector<Case> cases;
  cases.push_back({"Y=x", 0.5, test::sample_space_time(201, 201, 1.0, 1.0, [](double x, double) { return x; })});
  for (double g : {0.5, 0.6, 0.8}) cases.push_back({fmt("W-M %.1f", g), g, test::weierstrass_field(g)});
  Outcome o;
  for (const auto& c : cases) {
    const double got = estimate_holder(c.field, opts).gamma;
    o.pass = o.pass && std::abs(got - c.exponent) <= kHolderAccuracy;
    o.detail += fmt("%s -> %.4f; ", c.name.c_str(), got);
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < kBudgetHolder;
  o.detail += fmt("%.1fs", secs);
  return o;
}

// 6
Outcome morrey_oracles() {
  Outcome o;
  MorreyParams p;
  p.delta = 0.25;
  const double constant = morrey_norm(Field(Grid1D(1.0, 401), 1.0), p) / std::pow(2.0, 0.25) - 1.0;

  Grid1D fine(1.0, 2001);
  Field spike = Field::from_function(fine, [](double x) { return std::abs(x - 0.5) <= 0.005 + 1e-12 ? 1.0 : 0.0; });
  spike *= 1.0 / integrate(spike);
  const double spike_err = morrey_norm(spike, p) / std::pow(0.005, -0.25) - 1.0;

  Grid1D g(1.0, 257);
  std::size_t homogeneity_failures = 0;
  double subadd_excess = -INFINITY;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const Field f = test::random_field(g, s);
    const Field h = test::random_field(g, s + 1000);
    const double mf = morrey_norm(f, p);
    for (double c : {-4.0, 0.5, 2.0, 0.125}) {
      if (morrey_norm(c * f, p) != std::abs(c) * mf) ++homogeneity_failures;
    }
    subadd_excess = std::max(subadd_excess, morrey_norm(f + h, p) - mf - morrey_norm(h, p));
  }
  o.pass = std::abs(constant) <= kMorreyConstant && std::abs(spike_err) <= kMorreySpike && homogeneity_failures == 0 &&
           subadd_excess <= kSubadditivity;
  o.detail = fmt("constant %+.2f%%, spike %+.2f%%, homogeneity failures %zu/400, max subadditivity excess %.2e",
                 100.0 * constant, 100.0 * spike_err, homogeneity_failures, subadd_excess);
  return o;
}

// 7
Outcome inequality_suites() {
  const auto t0 = std::chrono::steady_clock::now();
  Grid1D g(1.0, 201);
  EnsembleSpec train;
  train.kind = EnsembleKind::mixed;
  train.sample_count = 1000;
  train.seed = 1;
  std::vector<InequalityParams> checks;
  {
    InequalityParams p;
    p.id = InequalityId::key1;
    checks.push_back(p);
    for (double d : {0.1, 0.25}) {
      p.id = InequalityId::key2;
      p.delta = d;
      checks.push_back(p);
    }
    for (double w : {1.0, 0.1, 0.01}) {
      p = InequalityParams{};
      p.id = InequalityId::interp_morrey;
      p.eps_weight = w;
      checks.push_back(p);
    }
  }
  Outcome o;
  for (const auto& p : checks) {
    const auto r = run_inequality_check(g, train, 2, p, kSafetyFactor);
    o.pass = o.pass && r.violations == 0 && std::isfinite(r.calibrated_c);
    const std::string tag = p.id == InequalityId::key2            ? fmt("key2(%.2f)", p.delta)
                            : p.id == InequalityId::interp_morrey ? fmt("interp(%.2f)", p.eps_weight)
                                                                  : std::string("key1");
    o.detail += fmt("%s C=%.3g viol=%zu; ", tag.c_str(), r.calibrated_c, r.violations);
  }

  // scale invariance of the key ratios
  double worst = 0.0;
  const auto ens = generate_ensemble(g, train);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& u = ens[i];
    for (double x0 : {0.25, 0.5}) {
      const auto phi1 = make_cutoff(g, 0.125, x0, 1.0 / 3.0);
      const auto phi2 = make_cutoff(g, 0.125, x0, 1.25 / 3.25);
      const double a = check_key1(u, phi1), b = check_key2(u, phi2, 0.25);
      for (double s : {1e-3, 1e3}) {
        if (a > 0.0) worst = std::max(worst, std::abs(check_key1(s * u, phi1) / a - 1.0));
        if (b > 0.0) worst = std::max(worst, std::abs(check_key2(s * u, phi2, 0.25) / b - 1.0));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && worst <= kScaleInvariance && secs < kBudgetInequalities;
  o.detail += fmt("scale invariance %.1e; %.1fs", worst, secs);
  return o;
}

// 8
Outcome energy_machinery() {
  Outcome o;
  Grid1D g(1.0, 201);
  auto random_state = [&](std::size_t m, std::uint64_t seed) {
    std::vector<Field> species;
    for (std::size_t j = 0; j < m; ++j) species.push_back(test::random_field(g, seed * 17 + j, 0.0, 3.0));
    return make_state(0.0, std::move(species));
  };
  double collapse = 0.0;
  for (int p : {2, 3, 4}) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const std::size_t m = 1 + seed % 4;
      const auto s = random_state(m, seed);
      Field pw = total_density(s);
      for (auto& v : pw.values()) v = std::pow(v, p);
      const double exact = integrate(pw);
      collapse = std::max(collapse, std::abs(lp_energy(s, p, std::vector<double>(m, 1.0)) / exact - 1.0));
    }
  }

  const std::vector<double> theta = {1.4, 0.6, 1.1};
  const auto lam = norm_equivalence_lambda(3, 2, theta, 4000, 1);
  const EnergyWeights w(3, 2, theta);
  std::size_t outside = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const double r = norm_ratio(random_state(3, seed), w);
    if (r < lam.lambda_low * (1.0 - 1e-12) || r > lam.lambda_high * (1.0 + 1e-12)) ++outside;
  }

  const auto coarse = energy_dissipation_monitor(find_run("cubic_exchange", 1, 401).traj, 2, {1.0, 1.0}, 3.0, 0.1);
  const auto fine = energy_dissipation_monitor(find_run("cubic_exchange", 1, 801).traj, 2, {1.0, 1.0}, 3.0, 0.1);
  const double stability = std::abs(coarse.sup_ratio / fine.sup_ratio - 1.0);
  // pointwise agreement of the two ratio series, reported alongside
  double curve_gap = 0.0;
  for (std::size_t i = 0; i < std::min(coarse.samples.size(), fine.samples.size()); ++i) {
    curve_gap = std::max(curve_gap, std::abs(coarse.samples[i].ratio - fine.samples[i].ratio));
  }
  o.pass = collapse <= kCollapse && outside == 0 && lam.lambda_low > 0.0 && std::isfinite(coarse.sup_ratio) &&
           std::isfinite(fine.sup_ratio) && stability <= kMonitorStability;
  o.detail = fmt("collapse %.1e; %zu/1000 states outside [%.4f, %.4f]; monitor sup ratio %.3e vs %.3e (%.1f%%), "
                 "ratio series gap %.1e",
                 collapse, outside, lam.lambda_low, lam.lambda_high, coarse.sup_ratio, fine.sup_ratio,
                 100.0 * stability, curve_gap);
  return o;
}

// 9
Outcome structural_equivalences() {
  Outcome o;
  Grid1D g(1.0, 81);
  double aug = 0.0;
  {
    const auto sys = make_preset("cubic_autocatalysis");
    const auto u0 = random_cosine_state(g, 2, 2.0, 6, 3);
    auto cfg = fixed_step_config(1e-3);
    cfg.snapshot_interval = 0.1;
    const auto a = simulate(sys, u0, 2.0, cfg);
    const auto b = simulate(augment_conservative(sys), augment_state(u0), 2.0, cfg);
    if (a.snapshots.size() != b.snapshots.size()) aug = INFINITY;
    for (std::size_t i = 0; i < std::min(a.snapshots.size(), b.snapshots.size()); ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < g.size(); ++k) {
          aug = std::max(aug, std::abs(a.snapshots[i].species[j][k] - b.snapshots[i].species[j][k]));
        }
      }
    }
  }
  double resc = 0.0;
  {
    const auto sys = make_preset("linear_decay");
    const double k1 = sys.k1();
    const auto u0 = random_cosine_state(g, 2, 2.0, 6, 2);
    auto cfg = fixed_step_config(1e-5);
    cfg.snapshot_interval = 0.1;
    const auto direct = simulate(sys, u0, 0.5, cfg);
    const auto scaled =
        simulate(rescaled_system(sys, k1), rescale_exponential(u0, k1, RescaleDirection::forward), 0.5, cfg);
    for (std::size_t i = 0; i < direct.snapshots.size(); ++i) {
      const auto back = rescale_exponential(scaled.snapshots[i], k1, RescaleDirection::inverse);
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < g.size(); ++k) {
          resc = std::max(resc, std::abs(back.species[j][k] - direct.snapshots[i].species[j][k]));
        }
      }
    }
  }
  double boundary = 0.0;
  bool monotone = true;
  double prev = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double d = k / 1000.0;
    const double xi = xi_admissible(d).xi_max;
    boundary = std::max(boundary, std::abs(d * (2.0 - xi) - xi * (3.0 + xi)));
    monotone = monotone && xi > prev;
    prev = xi;
  }
  o.pass = aug <= kAugmentation && resc <= kRescaling && boundary <= kXiBoundary && monotone;
  o.detail = fmt("augmentation %.1e; rescaling %.1e; xi boundary %.1e; xi strictly increasing: %s", aug, resc,
                 boundary, monotone ? "yes" : "no");
  return o;
}

// 10
ReactionSystem manufactured_heat() {
  SystemDefinition def;
  def.name = "manufactured";
  def.diffusion = {1.0};
  def.reaction = [](double x, double t, std::span<const double>, std::span<double> out) {
    out[0] = std::exp(-t) * (-2.0 + (kPi * kPi - 1.0) * std::cos(kPi * x));
  };
  return ReactionSystem(def);
}

double manufactured_error(std::size_t n, double dt, DiffusionScheme scheme, double T) {
  Grid1D g(1.0, n);
  auto exact = [](double x, double t) { return std::exp(-t) * (2.0 + std::cos(kPi * x)); };
  const auto u0 = make_state(0.0, {Field::from_function(g, [&](double x) { return exact(x, 0.0); })});
  const auto traj = simulate(manufactured_heat(), u0, T, fixed_step_config(dt, scheme));
  const auto& u = traj.snapshots.back().species[0];
  double err = 0.0;
  for (std::size_t k = 0; k < n; ++k) err = std::max(err, std::abs(u[k] - exact(g.node(k), T)));
  return err;
}

Outcome convergence() {
  auto orders = [](const std::function<double(int)>& err) {
    const double e0 = err(0), e1 = err(1), e2 = err(2);
    return std::vector<double>{std::log2(e0 / e1), std::log2(e1 / e2)};
  };
  const auto space = orders([](int k) {
    return manufactured_error(20 * (1u << k) + 1, 1e-4, DiffusionScheme::crank_nicolson, 0.5);
  });
  const auto be = orders([](int k) {
    return manufactured_error(401, 0.02 / (1 << k), DiffusionScheme::backward_euler, 1.0);
  });
  const auto cn = orders([](int k) {
    return manufactured_error(1601, 0.04 / (1 << k), DiffusionScheme::crank_nicolson, 1.0);
  });
  auto within = [](const std::vector<double>& v, double lo, double hi) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x >= lo && x <= hi; });
  };
  Grid1D g(1.0, 21);
  const double u0 = 10.0;
  const auto blow = simulate(make_preset("quadratic_blowup"), constant_state(g, {u0}), 1.0, SolverConfig{});
  const double tstar = blow.blowup ? blow.blowup->time : INFINITY;
  const double terr = std::abs(tstar * u0 - 1.0);
  Outcome o;
  o.pass = within(space, 1.8, 2.2) && within(be, 0.8, 1.2) && within(cn, 1.8, 2.2) &&
           blow.termination == Termination::blown_up && terr <= kBlowupTime;
  o.detail = fmt("space %.3f/%.3f, BE time %.3f/%.3f, CN time %.3f/%.3f; u0=10 blow-up at t*=%.4f (%.1f%% from 1/u0)",
                 space[0], space[1], be[0], be[1], cn[0], cn[1], tstar, 100.0 * terr);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"conservation and dissipation", conservation},
      {"global boundedness", boundedness},
      {"non-concentration", nonconcentration},
      {"localized-mass scaling", localized_mass_scaling},
      {"Hoelder estimator accuracy", holder_accuracy},
      {"Morrey oracle values", morrey_oracles},
      {"inequality suites", inequality_suites},
      {"energy machinery", energy_machinery},
      {"structural equivalences", structural_equivalences},
      {"solver convergence", convergence},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    if (index == 2) build_desk_runs();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed;
}
