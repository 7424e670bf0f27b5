#include <stdexcept>

#include "rdv/systems.hpp"

namespace rdv {

namespace {

Monomial mono(double c, std::vector<int> e) { return Monomial{c, std::move(e)}; }

std::vector<double> pick_diffusion(const PresetOptions& opts, std::vector<double> fallback) {
  if (opts.diffusion.empty()) return fallback;
  if (opts.diffusion.size() != fallback.size()) {
    throw std::invalid_argument("preset expects " + std::to_string(fallback.size()) +
                                " diffusion coefficients");
  }
  return opts.diffusion;
}

const std::vector<std::vector<double>> kLowerOnes = {{1.0, 0.0}, {1.0, 1.0}};

/// f1 = u2^p - u1^p, f2 = u1^p - u2^p.
PolynomialTable exchange_table(int p) {
  return {{mono(1.0, {0, p}), mono(-1.0, {p, 0})}, {mono(1.0, {p, 0}), mono(-1.0, {0, p})}};
}

SystemDefinition exchange_definition(std::string name, int p, const PresetOptions& opts) {
  if (p < 1) throw std::invalid_argument("exchange exponent must be >= 1");
  SystemDefinition def;
  def.name = std::move(name);
  def.diffusion = pick_diffusion(opts, {1.0, 0.1});
  def.polynomial = exchange_table(p);
  def.isc_matrix = kLowerOnes;
  def.isc_order = p;
  def.growth_order = p;
  return def;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"heat",         "cubic_exchange",   "cubic_autocatalysis", "mass_control",
          "linear_decay", "exchange",         "quadratic_blowup",    "negative_source",
          "quartic_growth"};
}

ReactionSystem make_preset(std::string_view name, const PresetOptions& opts) {
  if (name == "heat") {
    const std::size_t m = opts.species_count == 0 ? 1 : opts.species_count;
    SystemDefinition def;
    def.name = "heat";
    def.diffusion = pick_diffusion(opts, std::vector<double>(m, 1.0));
    def.polynomial = PolynomialTable(m);
    return ReactionSystem(std::move(def));
  }
  if (name == "cubic_exchange") return ReactionSystem(exchange_definition("cubic_exchange", 3, opts));
  if (name == "exchange") {
    return ReactionSystem(
        exchange_definition("exchange_r" + std::to_string(opts.exponent), opts.exponent, opts));
  }
  if (name == "cubic_autocatalysis") {
    // f1 = -u1 u2^2, f2 = u1 u2^2 - u2
    SystemDefinition def;
    def.name = "cubic_autocatalysis";
    def.diffusion = pick_diffusion(opts, {1.0, 0.1});
    def.polynomial = PolynomialTable{{mono(-1.0, {1, 2})}, {mono(1.0, {1, 2}), mono(-1.0, {0, 1})}};
    def.isc_matrix = kLowerOnes;
    def.isc_order = 3.0;
    def.growth_order = 3.0;
    return ReactionSystem(std::move(def));
  }
  if (name == "mass_control") {
    SystemDefinition def = exchange_definition("mass_control", 3, opts);
    auto& table = *def.polynomial;
    table[0].insert(table[0].begin(), mono(1.0, {0, 0}));
    def.k0 = 1.0;
    def.k1 = 0.0;
    return ReactionSystem(std::move(def));
  }
  if (name == "linear_decay") {
    SystemDefinition def = exchange_definition("linear_decay", 3, opts);
    auto& table = *def.polynomial;
    table[0].push_back(mono(-0.5, {1, 0}));
    table[1].push_back(mono(-0.5, {0, 1}));
    def.k0 = 0.0;
    def.k1 = -0.5;
    return ReactionSystem(std::move(def));
  }
  if (name == "quadratic_blowup") {
    SystemDefinition def;
    def.name = "quadratic_blowup";
    def.diffusion = pick_diffusion(opts, {1.0});
    def.polynomial = PolynomialTable{{mono(1.0, {2})}};
    def.isc_order = 2.0;
    def.growth_order = 2.0;
    return ReactionSystem(std::move(def));
  }
  if (name == "negative_source") {
    SystemDefinition def;
    def.name = "negative_source";
    def.diffusion = pick_diffusion(opts, {1.0});
    def.polynomial = PolynomialTable{{mono(-1.0, {0})}};
    return ReactionSystem(std::move(def));
  }
  if (name == "quartic_growth") {
    SystemDefinition def;
    def.name = "quartic_growth";
    def.diffusion = pick_diffusion(opts, {1.0});
    def.polynomial = PolynomialTable{{mono(1.0, {4})}};
    def.isc_order = 3.0;
    def.growth_order = 4.0;
    return ReactionSystem(std::move(def));
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace rdv
