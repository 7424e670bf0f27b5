#include "rdv/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdv/random.hpp"

namespace rdv {

namespace {

double monomial_value(const Monomial& term, std::span<const double> u) {
  double v = term.coeff;
  for (std::size_t j = 0; j < term.exponents.size(); ++j) {
    for (int e = 0; e < term.exponents[j]; ++e) v *= u[j];
  }
  return v;
}

void validate_table(const PolynomialTable& table, std::size_t m) {
  if (table.size() != m) {
    throw std::invalid_argument("polynomial table has " + std::to_string(table.size()) +
                                " rows, expected " + std::to_string(m));
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& term : table[i]) {
      if (term.exponents.size() != m) {
        throw std::invalid_argument("species " + std::to_string(i + 1) +
                                    ": monomial exponent vector must have length " +
                                    std::to_string(m));
      }
      if (std::any_of(term.exponents.begin(), term.exponents.end(), [](int e) { return e < 0; })) {
        throw std::invalid_argument("species " + std::to_string(i + 1) +
                                    ": negative monomial exponent");
      }
      if (!std::isfinite(term.coeff)) {
        throw std::invalid_argument("species " + std::to_string(i + 1) +
                                    ": non-finite monomial coefficient");
      }
    }
  }
}

}  // namespace

ReactionFn polynomial_reaction(PolynomialTable table) {
  return [table = std::move(table)](double, double, std::span<const double> u,
                                    std::span<double> out) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      double acc = 0.0;
      for (const auto& term : table[i]) acc += monomial_value(term, u);
      out[i] = acc;
    }
  };
}

ReactionSystem::ReactionSystem(SystemDefinition def) : def_(std::move(def)) {
  const std::size_t m = def_.diffusion.size();
  if (m == 0) throw std::invalid_argument("reaction system needs at least one species");
  for (double d : def_.diffusion) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("diffusion coefficients must be positive and finite");
    }
  }
  if (!def_.reaction) {
    if (!def_.polynomial) throw std::invalid_argument("reaction system has no reaction term");
    def_.reaction = polynomial_reaction(*def_.polynomial);
  }
  if (def_.polynomial) validate_table(*def_.polynomial, m);

  if (def_.isc_matrix.empty()) {
    def_.isc_matrix.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) def_.isc_matrix[i][i] = 1.0;
  }
  if (def_.isc_matrix.size() != m) throw std::invalid_argument("isc_matrix must be m x m");
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = def_.isc_matrix[i];
    if (row.size() != m) throw std::invalid_argument("isc_matrix must be m x m");
    for (std::size_t j = 0; j < m; ++j) {
      if (j > i && row[j] != 0.0) {
        throw std::invalid_argument("isc_matrix must be lower triangular");
      }
      if (row[j] < 0.0) throw std::invalid_argument("isc_matrix entries must be nonnegative");
    }
    if (!(row[i] > 0.0)) throw std::invalid_argument("isc_matrix diagonal must be positive");
  }
  if (!(def_.isc_order >= 1.0)) throw std::invalid_argument("isc order r must be >= 1");
  if (!(def_.growth_order > 0.0)) throw std::invalid_argument("growth order must be > 0");

  if (def_.mass_weights.empty()) def_.mass_weights.assign(m, 1.0);
  if (def_.mass_weights.size() != m) throw std::invalid_argument("alpha must have m entries");
  for (double a : def_.mass_weights) {
    if (!(a > 0.0)) throw std::invalid_argument("mass weights alpha must be positive");
  }
  if (!(def_.k0 >= 0.0)) throw std::invalid_argument("k0 must be >= 0");
}

double StateVector::max_norm() const {
  double m = 0.0;
  for (const auto& f : species) {
    for (double v : f.values()) m = std::max(m, std::abs(v));
  }
  return m;
}

bool StateVector::nonnegative(double tolerance) const {
  const double floor = -tolerance * (1.0 + max_norm());
  for (const auto& f : species) {
    for (double v : f.values()) {
      if (v < floor) return false;
    }
  }
  return true;
}

StateVector make_state(double time, std::vector<Field> species) {
  if (species.empty()) throw std::invalid_argument("state needs at least one species");
  for (const auto& f : species) require_same_grid(species.front().grid(), f.grid());
  return StateVector{time, std::move(species)};
}

ReactionOverflow::ReactionOverflow(std::size_t node_, std::size_t species_, double value_)
    : std::runtime_error("non-finite reaction value " + std::to_string(value_) + " for species " +
                         std::to_string(species_ + 1) + " at node " + std::to_string(node_)),
      node(node_),
      species(species_),
      value(value_) {}

void evaluate_reactions_into(const ReactionSystem& sys, const StateVector& state,
                             std::vector<std::vector<double>>& out) {
  const std::size_t m = sys.species_count();
  if (state.species_count() != m) {
    throw std::invalid_argument("state has " + std::to_string(state.species_count()) +
                                " species, system expects " + std::to_string(m));
  }
  const Grid1D& grid = state.grid();
  const std::size_t n = grid.size();
  out.resize(m);
  for (auto& o : out) o.resize(n);
  std::vector<double> u(m), f(m);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m; ++i) u[i] = std::max(state.species[i][k], 0.0);
    sys.evaluate(grid.node(k), state.time, u, f);
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(f[i])) throw ReactionOverflow(k, i, f[i]);
      out[i][k] = f[i];
    }
  }
}

std::vector<Field> evaluate_reactions(const ReactionSystem& sys, const StateVector& state) {
  std::vector<std::vector<double>> raw;
  evaluate_reactions_into(sys, state, raw);
  std::vector<Field> fields;
  fields.reserve(raw.size());
  for (auto& r : raw) fields.emplace_back(state.grid(), std::move(r));
  return fields;
}

double reaction_jacobian_norm(const ReactionSystem& sys, const StateVector& state) {
  const std::size_t m = sys.species_count();
  const Grid1D& grid = state.grid();
  std::vector<double> u(m), up(m), f0(m), f1(m), rows(m);
  double norm = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t i = 0; i < m; ++i) u[i] = std::max(state.species[i][k], 0.0);
    sys.evaluate(grid.node(k), state.time, u, f0);
    std::fill(rows.begin(), rows.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      up = u;
      const double eta = 1e-7 * (1.0 + std::abs(u[j]));
      up[j] += eta;
      sys.evaluate(grid.node(k), state.time, up, f1);
      for (std::size_t i = 0; i < m; ++i) rows[i] += std::abs(f1[i] - f0[i]) / eta;
    }
    for (double r : rows) {
      if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
      norm = std::max(norm, r);
    }
  }
  return norm;
}

namespace {

struct PointSample {
  double x;
  double t;
  std::vector<double> u;
};

/// Box vertices of [0,R]^m (for m <= 12) followed by uniform interior samples.
std::vector<PointSample> sample_box(std::size_t m, const SamplerConfig& cfg, double length_hint) {
  Rng rng(cfg.seed);
  std::vector<PointSample> out;
  if (m <= 12) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      PointSample s{0.5 * length_hint, 0.0, std::vector<double>(m)};
      for (std::size_t j = 0; j < m; ++j) s.u[j] = (mask >> j & 1U) ? cfg.radius : 0.0;
      out.push_back(std::move(s));
    }
  }
  for (std::size_t s = 0; s < cfg.sample_count; ++s) {
    PointSample p{rng.uniform(0.0, length_hint), rng.uniform(0.0, cfg.time_max),
                  std::vector<double>(m)};
    for (auto& v : p.u) v = rng.uniform(0.0, cfg.radius);
    out.push_back(std::move(p));
  }
  return out;
}

constexpr double kCheckTolerance = 1e-12;

}  // namespace

QuasiPositivityReport check_quasi_positivity(const ReactionSystem& sys, const SamplerConfig& cfg) {
  const std::size_t m = sys.species_count();
  QuasiPositivityReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  std::vector<double> f(m);
  const auto samples = sample_box(m, cfg, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto s : samples) {
      s.u[i] = 0.0;
      sys.evaluate(s.x, s.t, s.u, f);
      if (f[i] < report.min_value) {
        report.min_value = f[i];
        report.witness = Witness{i, s.x, s.t, s.u, f[i]};
      }
    }
  }
  report.worst_violation = std::max(0.0, -report.min_value);
  report.pass = report.min_value >= -kCheckTolerance;
  return report;
}

MassReport check_mass_dissipation(const ReactionSystem& sys, const SamplerConfig& cfg) {
  const std::size_t m = sys.species_count();
  const auto& alpha = sys.mass_weights();
  MassReport report;
  report.max_sum = -std::numeric_limits<double>::infinity();
  report.max_control_excess = -std::numeric_limits<double>::infinity();
  bool dissipative = true;
  bool conservative = true;
  bool controlled = true;
  std::vector<double> f(m);
  for (const auto& s : sample_box(m, cfg, 1.0)) {
    sys.evaluate(s.x, s.t, s.u, f);
    double sum = 0.0;
    double magnitude = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sum += alpha[i] * f[i];
      magnitude += std::abs(alpha[i] * f[i]);
      mass += s.u[i];
    }
    const double tol = kCheckTolerance * (1.0 + magnitude);
    if (sum > report.max_sum) {
      report.max_sum = sum;
      report.witness = Witness{0, s.x, s.t, s.u, sum};
    }
    if (sum > tol) dissipative = false;
    if (std::abs(sum) > tol) conservative = false;
    const double excess = sum - sys.k0() - sys.k1() * mass;
    report.max_control_excess = std::max(report.max_control_excess, excess);
    if (excess > tol) controlled = false;
  }
  report.dissipative = dissipative;
  report.conservative = conservative;
  report.mass_controlled = controlled;
  return report;
}

IscReport check_isc(const ReactionSystem& sys, const SamplerConfig& cfg) {
  const std::size_t m = sys.species_count();
  const auto& a = sys.isc_matrix();
  const double r = sys.isc_order();
  SamplerConfig unit = cfg;
  unit.radius = 1.0;
  const auto samples = sample_box(m, unit, 1.0);

  auto estimate = [&](double radius, std::optional<Witness>* witness) {
    double c = 0.0;
    std::vector<double> u(m), f(m);
    for (const auto& s : samples) {
      double mass = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        u[j] = radius * s.u[j];
        mass += u[j];
      }
      sys.evaluate(s.x, s.t, u, f);
      const double scale = std::pow(1.0 + mass, r);
      for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j <= i; ++j) row += a[i][j] * f[j];
        const double ratio = row / scale;
        if (!(ratio <= c)) {  // also catches NaN
          c = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
          if (witness) *witness = Witness{i, s.x, s.t, u, ratio};
        }
      }
    }
    return c;
  };

  IscReport report;
  report.c_estimate = estimate(cfg.radius, &report.witness);
  report.c_estimate_doubled = estimate(2.0 * cfg.radius, nullptr);
  const bool finite = std::isfinite(report.c_estimate) && std::isfinite(report.c_estimate_doubled);
  if (!finite) {
    report.pass = false;
  } else if (report.c_estimate <= 0.0) {
    report.pass = report.c_estimate_doubled <= kCheckTolerance;
  } else {
    report.pass = report.c_estimate_doubled / report.c_estimate <= 1.1;
  }
  return report;
}

ReactionSystem augment_conservative(const ReactionSystem& sys) {
  const std::size_t m = sys.species_count();
  const SystemDefinition& base = sys.definition();
  SystemDefinition def;
  def.name = base.name + "+conservative";
  def.diffusion = base.diffusion;
  def.diffusion.push_back(1.0);

  const std::vector<double> alpha = base.mass_weights;
  def.reaction = [inner = base.reaction, alpha, m](double x, double t, std::span<const double> u,
                                                   std::span<double> out) {
    inner(x, t, u.first(m), out.first(m));
    // Same summation order as the mass check, so sum_j alpha_j g_j is exactly zero.
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += alpha[j] * out[j];
    out[m] = -s;
  };

  def.isc_matrix = base.isc_matrix;
  for (auto& row : def.isc_matrix) row.push_back(0.0);
  std::vector<double> last(alpha);
  last.push_back(1.0);
  def.isc_matrix.push_back(std::move(last));
  def.isc_order = base.isc_order;
  def.growth_order = base.growth_order;
  def.mass_weights = alpha;
  def.mass_weights.push_back(1.0);

  if (base.polynomial) {
    PolynomialTable table = *base.polynomial;
    for (auto& row : table) {
      for (auto& term : row) term.exponents.push_back(0);
    }
    std::vector<Monomial> extra;
    for (std::size_t j = 0; j < m; ++j) {
      for (const auto& term : (*base.polynomial)[j]) {
        Monomial neg{-alpha[j] * term.coeff, term.exponents};
        neg.exponents.push_back(0);
        extra.push_back(std::move(neg));
      }
    }
    table.push_back(std::move(extra));
    def.polynomial = std::move(table);
  }
  return ReactionSystem(std::move(def));
}

StateVector augment_state(const StateVector& state) {
  StateVector out = state;
  out.species.emplace_back(state.grid(), 0.0);
  return out;
}

StateVector rescale_exponential(const StateVector& state, double k1, RescaleDirection dir) {
  const double exponent = (dir == RescaleDirection::forward ? -k1 : k1) * state.time;
  if (std::abs(exponent) > 700.0) {
    throw std::overflow_error("rescale_exponential: |k1 t| exceeds 700");
  }
  const double factor = std::exp(exponent);
  StateVector out = state;
  for (auto& f : out.species) f *= factor;
  return out;
}

ReactionSystem rescaled_system(const ReactionSystem& sys, double k1) {
  const SystemDefinition& base = sys.definition();
  SystemDefinition def;
  def.name = base.name + "/rescaled";
  def.diffusion = base.diffusion;
  const std::size_t m = base.diffusion.size();
  def.reaction = [inner = base.reaction, k1, m](double x, double t, std::span<const double> y,
                                                std::span<double> out) {
    const double grow = std::exp(k1 * t);
    const double shrink = std::exp(-k1 * t);
    double u[16];
    std::vector<double> heap;
    double* up = u;
    if (m > 16) {
      heap.resize(m);
      up = heap.data();
    }
    for (std::size_t i = 0; i < m; ++i) up[i] = grow * y[i];
    inner(x, t, std::span<const double>(up, m), out);
    for (std::size_t i = 0; i < m; ++i) out[i] = shrink * out[i] - k1 * y[i];
  };
  def.isc_matrix = base.isc_matrix;
  def.isc_order = base.isc_order;
  def.growth_order = base.growth_order;
  def.mass_weights = base.mass_weights;
  def.k0 = base.k0;
  def.k1 = 0.0;
  return ReactionSystem(std::move(def));
}

}  // namespace rdv
