#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdv/inequalities.hpp"
#include "rdv/morrey.hpp"
#include "rdv/solver.hpp"
#include "rdv/systems.hpp"

namespace rdv {

/// Malformed or inconsistent configuration. `where` is a dotted key path or
/// "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& message);
  std::string where;
};

enum class InitialKind { random_cosine, constant, cosine, spike };

struct InitialSpec {
  InitialKind kind = InitialKind::random_cosine;
  double peak = 2.0;  // random_cosine
  std::size_t modes = 6;
  std::vector<double> values;  // constant, one per species
  double mean = 1.0;           // cosine
  double amplitude = 0.5;
  double mass = 1.0;  // spike
  double width = 0.05;
  double center = 0.5;
};

struct DiagnosticsSpec {
  /// Morrey exponent; unset means gamma / (1 + 2 gamma) from the Hoelder fit.
  std::optional<double> morrey_delta;
  int morrey_octaves = 10;
  int morrey_radii_per_octave = 8;
  HolderOptions holder;
  int energy_p = 2;
  std::vector<double> energy_theta;  // empty: all ones
  std::optional<double> energy_r;    // unset: growth order of the system, at least 1
  std::optional<double> energy_alpha;  // "alpha_trial"; unset: smallest diffusion coefficient
  double duality_window = 1.0;
};

struct RunConfig {
  double length = 1.0;
  std::size_t nodes = 201;
  std::string preset = "cubic_exchange";
  PresetOptions preset_options;
  /// Polynomial system block {"d", "reactions", ...}; null when a preset is used.
  nlohmann::json custom_system;
  SolverConfig solver;
  bool adaptive = true;
  double final_time = 1.0;
  InitialSpec initial;
  DiagnosticsSpec diagnostics;
  std::uint64_t seed = 1;
};

/// Parses JSON text; syntax errors report line and column.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json load_json_file(const std::string& path);

/// Requires "grid" and "system"; every other section is optional. Unknown keys
/// are rejected.
RunConfig parse_run_config(const nlohmann::json& j);
DiagnosticsSpec parse_diagnostics(const nlohmann::json& j);

/// Inverse of parse_run_config, with every field written out.
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const DiagnosticsSpec& d);

/// {"name", "m", "d", "reactions": [[{"c", "exp"}, ...], ...], "isc_matrix", "r",
/// "ell", "alpha", "k0", "k1"}; only "d" and "reactions" are required.
SystemDefinition parse_system_table(const nlohmann::json& j);

ReactionSystem build_system(const RunConfig& cfg);
StateVector build_initial_state(const RunConfig& cfg, std::size_t species);

struct VerifyConfig {
  double length = 1.0;
  std::size_t nodes = 201;
  EnsembleSpec ensemble;
  std::uint64_t heldout_seed = 2;
  double safety_factor = 1.5;
  double calibration_scale = 1.0;
  std::vector<InequalityParams> checks;
};

/// "checks" defaults to key1, key2 (delta 0.1, 0.25) and interp_morrey
/// (eps_weight 1, 0.1, 0.01). heldout_seed defaults to seed + 1.
VerifyConfig parse_verify_config(const nlohmann::json& j);

struct ScanConfig {
  RunConfig base;
  std::vector<std::string> presets;
  std::vector<int> exponents;                    // r axis, "exchange" preset only
  std::vector<std::vector<double>> diffusions;  // empty entry: preset default
  std::vector<double> peaks;                     // random_cosine peak
  std::vector<std::uint64_t> seeds;
};

struct ScanRow {
  std::size_t index = 0;
  RunConfig config;
  std::string preset;
  std::optional<int> exponent;
  std::vector<double> diffusion;
  double peak = 0.0;
  std::uint64_t seed = 0;
};

ScanConfig parse_scan_config(const nlohmann::json& j);

/// Cartesian product preset x r x diffusion x peak x seed, in that nesting order.
std::vector<ScanRow> expand_scan(const ScanConfig& scan);

}  // namespace rdv
