#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdv/grid.hpp"

namespace rdv {

/// Pointwise reaction term: writes f(x, t, u) into `out` (size m).
using ReactionFn =
    std::function<void(double x, double t, std::span<const double> u, std::span<double> out)>;

struct Monomial {
  double coeff = 0.0;
  std::vector<int> exponents;  // one per species, each >= 0
};

/// Per-species list of monomials; f_i = sum of its row.
using PolynomialTable = std::vector<std::vector<Monomial>>;

ReactionFn polynomial_reaction(PolynomialTable table);

/// Everything needed to build a ReactionSystem. Empty isc_matrix means identity,
/// empty mass_weights means all ones.
struct SystemDefinition {
  std::string name;
  std::vector<double> diffusion;
  ReactionFn reaction;
  std::vector<std::vector<double>> isc_matrix;
  double isc_order = 1.0;
  double growth_order = 1.0;
  std::vector<double> mass_weights;
  double k0 = 0.0;
  double k1 = 0.0;
  std::optional<PolynomialTable> polynomial;
};

/// Reaction-diffusion system  u_t - d_i u_xx = f_i(x, t, u)  with Neumann
/// data, together with the structural constants of its assumptions
/// (intermediate-sum matrix A and order r, growth order, mass weights,
/// mass-control constants). Immutable after construction.
class ReactionSystem {
 public:
  explicit ReactionSystem(SystemDefinition def);

  const std::string& name() const { return def_.name; }
  std::size_t species_count() const { return def_.diffusion.size(); }
  const std::vector<double>& diffusion() const { return def_.diffusion; }
  const std::vector<std::vector<double>>& isc_matrix() const { return def_.isc_matrix; }
  double isc_order() const { return def_.isc_order; }
  double growth_order() const { return def_.growth_order; }
  const std::vector<double>& mass_weights() const { return def_.mass_weights; }
  double k0() const { return def_.k0; }
  double k1() const { return def_.k1; }
  const std::optional<PolynomialTable>& polynomial() const { return def_.polynomial; }
  const SystemDefinition& definition() const { return def_; }

  /// Raw evaluation, no clamping. `u` and `out` have size m.
  void evaluate(double x, double t, std::span<const double> u, std::span<double> out) const {
    def_.reaction(x, t, u, out);
  }

 private:
  SystemDefinition def_;
};

/// m species sharing one grid at time t.
struct StateVector {
  double time = 0.0;
  std::vector<Field> species;

  const Grid1D& grid() const { return species.front().grid(); }
  std::size_t species_count() const { return species.size(); }
  double max_norm() const;
  /// Every entry >= -tolerance * (1 + max_norm()).
  bool nonnegative(double tolerance = 1e-10) const;
};

StateVector make_state(double time, std::vector<Field> species);

/// Non-finite reaction value at a grid node.
class ReactionOverflow : public std::runtime_error {
 public:
  ReactionOverflow(std::size_t node, std::size_t species, double value);
  std::size_t node;
  std::size_t species;
  double value;
};

/// Pointwise f_i on the grid. Entries below zero are clamped to 0 first.
std::vector<Field> evaluate_reactions(const ReactionSystem& sys, const StateVector& state);

/// Same as evaluate_reactions but writes into preallocated per-species buffers.
void evaluate_reactions_into(const ReactionSystem& sys, const StateVector& state,
                             std::vector<std::vector<double>>& out);

/// Max over nodes of the row-sum norm of df/du, forward differences.
double reaction_jacobian_norm(const ReactionSystem& sys, const StateVector& state);

struct SamplerConfig {
  std::size_t sample_count = 4000;
  /// u sampled in [0, radius]^m. Cubic rows against (1 + sum u)^3 only settle
  /// (doubling ratio below 1.1) for radii of a few tens.
  double radius = 50.0;
  double time_max = 10.0;
  std::uint64_t seed = 1;
};

struct Witness {
  std::size_t species = 0;
  double x = 0.0;
  double t = 0.0;
  std::vector<double> u;
  double value = 0.0;
};

struct QuasiPositivityReport {
  bool pass = true;
  double min_value = 0.0;        // min of f_i over the faces {u_i = 0}
  double worst_violation = 0.0;  // max(0, -min_value)
  std::optional<Witness> witness;
};

struct MassReport {
  double max_sum = 0.0;            // max of sum_i alpha_i f_i
  bool dissipative = false;        // (A2): sum <= 0
  bool conservative = false;       // (A2'): sum == 0
  bool mass_controlled = false;    // sum <= k0 + k1 sum u
  double max_control_excess = 0.0;
  Witness witness;
};

struct IscReport {
  double c_estimate = 0.0;
  double c_estimate_doubled = 0.0;  // same samples, radius doubled
  bool pass = false;
  std::optional<Witness> witness;
};

QuasiPositivityReport check_quasi_positivity(const ReactionSystem& sys, const SamplerConfig& cfg);
MassReport check_mass_dissipation(const ReactionSystem& sys, const SamplerConfig& cfg);
IscReport check_isc(const ReactionSystem& sys, const SamplerConfig& cfg);

/// Appends u_{m+1} with d = 1 and g_{m+1} = -sum_j alpha_j f_j so that the
/// enlarged system conserves mass exactly.
ReactionSystem augment_conservative(const ReactionSystem& sys);

/// Initial data for the augmented system: the extra species starts at 0.
StateVector augment_state(const StateVector& state);

enum class RescaleDirection { forward, inverse };

/// forward: y = e^{-k1 t} u, inverse: u = e^{k1 t} y.
StateVector rescale_exponential(const StateVector& state, double k1, RescaleDirection dir);

/// System satisfied by y = e^{-k1 t} u:
///   y_t - d_i y_xx = e^{-k1 t} f_i(x, t, e^{k1 t} y) - k1 y_i.
ReactionSystem rescaled_system(const ReactionSystem& sys, double k1);

struct PresetOptions {
  std::size_t species_count = 1;        // heat only
  std::vector<double> diffusion;        // overrides preset default when non-empty
  int exponent = 3;                     // exchange family
};

/// Built-in systems: heat, cubic_exchange, cubic_autocatalysis, mass_control,
/// linear_decay, exchange, quadratic_blowup, negative_source, quartic_growth.
ReactionSystem make_preset(std::string_view name, const PresetOptions& opts = {});
std::vector<std::string> preset_names();

}  // namespace rdv
