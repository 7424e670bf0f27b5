#include "rdv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rdv/initial_data.hpp"

namespace rdv {

using nlohmann::json;

ConfigError::ConfigError(const std::string& where_, const std::string& message)
    : std::runtime_error(where_ + ": " + message), where(where_) {}

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

/// Walks one JSON object, tracking which keys were consumed so leftovers can
/// be reported by name.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(join_path(path_, key), "missing required key '" + key + "'");
    return j_.at(key);
  }

  Section section(const std::string& key) { return Section(at(key), join_path(path_, key)); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return number_at(key);
  }

  double number_at(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(join_path(path_, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(join_path(path_, key), "must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return number_at(key);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(join_path(path_, key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(join_path(path_, key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(join_path(path_, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(join_path(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return {};
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(join_path(path_, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(join_path(path_, key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  /// Marks a key as recognised without reading it.
  void skip(const std::string& key) { seen_.insert(key); }

  std::string path(const std::string& key) const { return join_path(path_, key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(join_path(path_, item.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

DiffusionScheme parse_scheme(const std::string& s, const std::string& where) {
  if (s == "backward_euler") return DiffusionScheme::backward_euler;
  if (s == "crank_nicolson") return DiffusionScheme::crank_nicolson;
  throw ConfigError(where, "unknown scheme '" + s + "' (backward_euler or crank_nicolson)");
}

std::string scheme_name(DiffusionScheme s) {
  return s == DiffusionScheme::backward_euler ? "backward_euler" : "crank_nicolson";
}

InitialKind parse_initial_kind(const std::string& s, const std::string& where) {
  if (s == "random_cosine") return InitialKind::random_cosine;
  if (s == "constant") return InitialKind::constant;
  if (s == "cosine") return InitialKind::cosine;
  if (s == "spike") return InitialKind::spike;
  throw ConfigError(where, "unknown initial kind '" + s + "'");
}

std::string initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::random_cosine: return "random_cosine";
    case InitialKind::constant: return "constant";
    case InitialKind::cosine: return "cosine";
    case InitialKind::spike: return "spike";
  }
  return "random_cosine";
}

void read_grid(Section grid, double& length, std::size_t& nodes) {
  length = grid.number_at("L");
  if (!grid.has("n")) grid.at("n");
  const auto n = grid.unsigned_integer("n", 0);
  if (!(length > 0.0)) throw ConfigError(grid.path("L"), "must be positive");
  if (n < 3) throw ConfigError(grid.path("n"), "need at least 3 nodes");
  nodes = static_cast<std::size_t>(n);
  grid.finish();
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column),
                      "invalid JSON");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.where, "invalid JSON");
  }
}

DiagnosticsSpec parse_diagnostics(const json& j) {
  DiagnosticsSpec d;
  Section s(j, "diagnostics");
  if (s.has("morrey")) {
    Section m = s.section("morrey");
    d.morrey_delta = m.optional_number("delta");
    d.morrey_octaves = m.integer("octaves", d.morrey_octaves);
    d.morrey_radii_per_octave = m.integer("radii_per_octave", d.morrey_radii_per_octave);
    if (d.morrey_delta && !(*d.morrey_delta >= 0.0 && *d.morrey_delta < 1.0)) {
      throw ConfigError(m.path("delta"), "must lie in [0, 1)");
    }
    if (d.morrey_octaves < 1) throw ConfigError(m.path("octaves"), "must be >= 1");
    if (d.morrey_radii_per_octave < 1) throw ConfigError(m.path("radii_per_octave"), "must be >= 1");
    m.finish();
  } else {
    s.skip("morrey");
  }
  if (s.has("holder")) {
    Section h = s.section("holder");
    d.holder.pair_count = h.unsigned_integer("pairs", d.holder.pair_count);
    d.holder.seed = h.unsigned_integer("seed", d.holder.seed);
    d.holder.quantile = h.number("quantile", d.holder.quantile);
    d.holder.max_offset_fraction = h.number("max_offset_fraction", d.holder.max_offset_fraction);
    if (d.holder.pair_count == 0) throw ConfigError(h.path("pairs"), "must be positive");
    if (!(d.holder.quantile > 0.0 && d.holder.quantile < 1.0)) {
      throw ConfigError(h.path("quantile"), "must lie in (0, 1)");
    }
    if (!(d.holder.max_offset_fraction > 0.0 && d.holder.max_offset_fraction <= 1.0)) {
      throw ConfigError(h.path("max_offset_fraction"), "must lie in (0, 1]");
    }
    h.finish();
  } else {
    s.skip("holder");
  }
  if (s.has("energy")) {
    Section e = s.section("energy");
    d.energy_p = e.integer("p", d.energy_p);
    d.energy_theta = e.numbers("theta");
    d.energy_r = e.optional_number("r");
    d.energy_alpha = e.optional_number("alpha_trial");
    if (d.energy_p < 1 || d.energy_p > 20) throw ConfigError(e.path("p"), "must lie in [1, 20]");
    for (double t : d.energy_theta) {
      if (!(t > 0.0)) throw ConfigError(e.path("theta"), "entries must be positive");
    }
    if (d.energy_r && !(*d.energy_r >= 1.0)) throw ConfigError(e.path("r"), "must be >= 1");
    e.finish();
  } else {
    s.skip("energy");
  }
  d.duality_window = s.number("duality_window", d.duality_window);
  if (!(d.duality_window > 0.0)) throw ConfigError(s.path("duality_window"), "must be positive");
  s.finish();
  return d;
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  Section root(j, "");
  read_grid(root.section("grid"), cfg.length, cfg.nodes);

  if (root.has("system") && root.at("system").is_object() && root.at("system").contains("reactions")) {
    const json& block = root.at("system");
    const SystemDefinition def = parse_system_table(block);
    try {
      ReactionSystem check{def};
    } catch (const std::invalid_argument& e) {
      throw ConfigError("system", e.what());
    }
    cfg.custom_system = block;
    cfg.preset = def.name;
    cfg.preset_options.diffusion = def.diffusion;
  } else {
    Section sys = root.section("system");
    cfg.preset = sys.string("preset", cfg.preset);
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), cfg.preset) == names.end()) {
      throw ConfigError(sys.path("preset"), "unknown preset '" + cfg.preset + "'");
    }
    cfg.preset_options.diffusion = sys.numbers("diffusion");
    for (double d : cfg.preset_options.diffusion) {
      if (!(d > 0.0)) throw ConfigError(sys.path("diffusion"), "coefficients must be positive");
    }
    cfg.preset_options.exponent = sys.integer("exponent", cfg.preset_options.exponent);
    if (cfg.preset_options.exponent < 1) throw ConfigError(sys.path("exponent"), "must be >= 1");
    const auto species = sys.unsigned_integer("species", cfg.preset_options.species_count);
    if (species < 1) throw ConfigError(sys.path("species"), "must be >= 1");
    cfg.preset_options.species_count = static_cast<std::size_t>(species);
    sys.finish();
  }

  if (root.has("solver")) {
    Section s = root.section("solver");
    SolverConfig& sc = cfg.solver;
    sc.dt_initial = s.number("dt", sc.dt_initial);
    sc.dt_min = s.number("dt_min", sc.dt_min);
    sc.dt_max = s.number("dt_max", sc.dt_max);
    sc.cfl_reaction = s.number("cfl_reaction", sc.cfl_reaction);
    sc.scheme = parse_scheme(s.string("scheme", scheme_name(sc.scheme)), s.path("scheme"));
    sc.blowup_threshold = s.number("blowup_threshold", sc.blowup_threshold);
    sc.snapshot_stride = s.unsigned_integer("snapshot_stride", sc.snapshot_stride);
    sc.snapshot_interval = s.number("snapshot_interval", sc.snapshot_interval);
    sc.positivity_tolerance = s.number("positivity_tolerance", sc.positivity_tolerance);
    sc.max_steps = s.unsigned_integer("max_steps", sc.max_steps);
    cfg.adaptive = s.boolean("adaptive", cfg.adaptive);
    cfg.final_time = s.number("T", cfg.final_time);
    if (!(cfg.final_time > 0.0)) throw ConfigError(s.path("T"), "must be positive");
    s.finish();
    if (!cfg.adaptive) {
      SolverConfig fixed = fixed_step_config(sc.dt_initial, sc.scheme);
      fixed.blowup_threshold = sc.blowup_threshold;
      fixed.snapshot_stride = sc.snapshot_stride;
      fixed.snapshot_interval = sc.snapshot_interval;
      fixed.positivity_tolerance = sc.positivity_tolerance;
      fixed.max_steps = sc.max_steps;
      sc = fixed;
    }
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("solver", e.what());
    }
  }

  if (root.has("initial")) {
    Section s = root.section("initial");
    InitialSpec& in = cfg.initial;
    in.kind = parse_initial_kind(s.string("kind", initial_kind_name(in.kind)), s.path("kind"));
    in.peak = s.number("peak", in.peak);
    in.modes = s.unsigned_integer("modes", in.modes);
    in.values = s.numbers("values");
    in.mean = s.number("mean", in.mean);
    in.amplitude = s.number("amplitude", in.amplitude);
    in.mass = s.number("mass", in.mass);
    in.width = s.number("width", in.width);
    in.center = s.number("center", in.center);
    if (in.kind == InitialKind::constant && in.values.empty()) {
      throw ConfigError(s.path("values"), "constant initial data needs one value per species");
    }
    if (in.kind == InitialKind::random_cosine && !(in.peak >= 0.0)) {
      throw ConfigError(s.path("peak"), "must be >= 0");
    }
    s.finish();
  }

  if (root.has("diagnostics")) cfg.diagnostics = parse_diagnostics(root.at("diagnostics"));
  cfg.seed = root.unsigned_integer("seed", cfg.seed);
  root.finish();
  return cfg;
}

json to_json(const DiagnosticsSpec& d) {
  json out;
  out["morrey"] = {{"delta", d.morrey_delta ? json(*d.morrey_delta) : json(nullptr)},
                   {"octaves", d.morrey_octaves},
                   {"radii_per_octave", d.morrey_radii_per_octave}};
  out["holder"] = {{"pairs", d.holder.pair_count},
                   {"seed", d.holder.seed},
                   {"quantile", d.holder.quantile},
                   {"max_offset_fraction", d.holder.max_offset_fraction}};
  out["energy"] = {{"p", d.energy_p},
                   {"theta", d.energy_theta},
                   {"r", d.energy_r ? json(*d.energy_r) : json(nullptr)},
                   {"alpha_trial", d.energy_alpha ? json(*d.energy_alpha) : json(nullptr)}};
  out["duality_window"] = d.duality_window;
  return out;
}

json to_json(const RunConfig& cfg) {
  json out;
  out["grid"] = {{"L", cfg.length}, {"n", cfg.nodes}};
  if (!cfg.custom_system.is_null()) {
    out["system"] = cfg.custom_system;
  } else {
    out["system"] = {{"preset", cfg.preset},
                     {"diffusion", cfg.preset_options.diffusion},
                     {"exponent", cfg.preset_options.exponent},
                     {"species", cfg.preset_options.species_count}};
  }
  const SolverConfig& sc = cfg.solver;
  out["solver"] = {{"dt", sc.dt_initial},
                   {"dt_min", sc.dt_min},
                   {"dt_max", sc.dt_max},
                   {"cfl_reaction", sc.cfl_reaction},
                   {"scheme", scheme_name(sc.scheme)},
                   {"blowup_threshold", sc.blowup_threshold},
                   {"snapshot_stride", sc.snapshot_stride},
                   {"snapshot_interval", sc.snapshot_interval},
                   {"positivity_tolerance", sc.positivity_tolerance},
                   {"max_steps", sc.max_steps},
                   {"adaptive", cfg.adaptive},
                   {"T", cfg.final_time}};
  const InitialSpec& in = cfg.initial;
  out["initial"] = {{"kind", initial_kind_name(in.kind)},
                    {"peak", in.peak},
                    {"modes", in.modes},
                    {"values", in.values},
                    {"mean", in.mean},
                    {"amplitude", in.amplitude},
                    {"mass", in.mass},
                    {"width", in.width},
                    {"center", in.center}};
  out["diagnostics"] = to_json(cfg.diagnostics);
  out["seed"] = cfg.seed;
  return out;
}

SystemDefinition parse_system_table(const json& j) {
  Section s(j, "system");
  SystemDefinition def;
  def.name = s.string("name", "custom");
  def.diffusion = s.numbers("d");
  if (def.diffusion.empty()) s.at("d");
  const std::size_t m = def.diffusion.size();
  const auto declared = s.unsigned_integer("m", m);
  if (declared != m) throw ConfigError(s.path("m"), "does not match the length of d");
  const json& reactions = s.at("reactions");
  if (!reactions.is_array() || reactions.size() != m) {
    throw ConfigError(s.path("reactions"), "expected one array of terms per species");
  }
  PolynomialTable table(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::string row_path = s.path("reactions") + "[" + std::to_string(i) + "]";
    if (!reactions[i].is_array()) throw ConfigError(row_path, "expected an array of terms");
    for (std::size_t t = 0; t < reactions[i].size(); ++t) {
      Section term(reactions[i][t], row_path + "[" + std::to_string(t) + "]");
      Monomial mono;
      mono.coeff = term.number_at("c");
      for (double e : term.numbers("exp")) {
        if (e < 0.0 || e != std::floor(e)) throw ConfigError(term.path("exp"), "exponents must be integers >= 0");
        mono.exponents.push_back(static_cast<int>(e));
      }
      if (mono.exponents.size() != m) throw ConfigError(term.path("exp"), "expected one exponent per species");
      term.finish();
      table[i].push_back(std::move(mono));
    }
  }
  def.polynomial = std::move(table);
  if (s.has("isc_matrix")) {
    const json& a = s.at("isc_matrix");
    if (!a.is_array()) throw ConfigError(s.path("isc_matrix"), "expected an m x m array");
    for (const auto& row : a) {
      if (!row.is_array()) throw ConfigError(s.path("isc_matrix"), "expected an m x m array");
      std::vector<double> r;
      for (const auto& x : row) {
        if (!x.is_number()) throw ConfigError(s.path("isc_matrix"), "entries must be numbers");
        r.push_back(x.get<double>());
      }
      def.isc_matrix.push_back(std::move(r));
    }
  } else {
    s.skip("isc_matrix");
  }
  def.isc_order = s.number("r", 1.0);
  def.growth_order = s.number("ell", 1.0);
  def.mass_weights = s.numbers("alpha");
  def.k0 = s.number("k0", 0.0);
  def.k1 = s.number("k1", 0.0);
  s.finish();
  return def;
}

ReactionSystem build_system(const RunConfig& cfg) {
  try {
    if (!cfg.custom_system.is_null()) return ReactionSystem(parse_system_table(cfg.custom_system));
    return make_preset(cfg.preset, cfg.preset_options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("system", e.what());
  }
}

StateVector build_initial_state(const RunConfig& cfg, std::size_t species) {
  const Grid1D grid(cfg.length, cfg.nodes);
  const InitialSpec& in = cfg.initial;
  try {
    switch (in.kind) {
      case InitialKind::random_cosine: return random_cosine_state(grid, species, in.peak, in.modes, cfg.seed);
      case InitialKind::constant:
        if (in.values.size() != species) {
          throw ConfigError("initial.values", "expected " + std::to_string(species) + " values");
        }
        return constant_state(grid, in.values);
      case InitialKind::cosine: return cosine_state(grid, species, in.mean, in.amplitude);
      case InitialKind::spike:
        return spike_state(grid, species, in.mass, in.width, in.center * cfg.length);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("initial", e.what());
  }
  throw ConfigError("initial.kind", "unsupported");
}

VerifyConfig parse_verify_config(const json& j) {
  VerifyConfig cfg;
  Section root(j, "");
  read_grid(root.section("grid"), cfg.length, cfg.nodes);
  EnsembleSpec& e = cfg.ensemble;
  if (root.has("ensemble")) {
    Section s = root.section("ensemble");
    try {
      e.kind = parse_ensemble_kind(s.string("kind", to_string(e.kind)));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(s.path("kind"), ex.what());
    }
    e.mode_count = s.unsigned_integer("mode_count", e.mode_count);
    e.bump_count = s.unsigned_integer("bump_count", e.bump_count);
    e.amplitude_min = s.number("amplitude_min", e.amplitude_min);
    e.amplitude_max = s.number("amplitude_max", e.amplitude_max);
    e.nonnegative = s.boolean("nonnegative", e.nonnegative);
    e.min_width = s.number("min_width", e.min_width);
    e.sample_count = s.unsigned_integer("samples", e.sample_count);
    s.finish();
    try {
      e.validate();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("ensemble", ex.what());
    }
  }
  e.seed = root.unsigned_integer("seed", e.seed);
  cfg.heldout_seed = root.unsigned_integer("heldout_seed", e.seed + 1);
  cfg.safety_factor = root.number("safety_factor", cfg.safety_factor);
  cfg.calibration_scale = root.number("calibration_scale", cfg.calibration_scale);
  if (!(cfg.safety_factor > 0.0)) throw ConfigError("safety_factor", "must be positive");
  if (!(cfg.calibration_scale > 0.0)) throw ConfigError("calibration_scale", "must be positive");
  if (root.has("checks")) {
    const json& list = root.at("checks");
    if (!list.is_array()) throw ConfigError("checks", "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      Section c(list[k], "checks[" + std::to_string(k) + "]");
      InequalityParams p;
      try {
        p.id = parse_inequality(c.string("inequality", ""));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.path("inequality"), ex.what());
      }
      p.delta = c.number("delta", p.delta);
      p.eps_weight = c.number("eps_weight", p.eps_weight);
      const auto radii = c.numbers("cutoff_radii");
      const auto centers = c.numbers("cutoff_centers");
      if (!radii.empty()) p.cutoff_radii = radii;
      if (!centers.empty()) p.cutoff_centers = centers;
      if (!(p.delta >= 0.0 && p.delta < 1.0)) throw ConfigError(c.path("delta"), "must lie in [0, 1)");
      if (!(p.eps_weight > 0.0)) throw ConfigError(c.path("eps_weight"), "must be positive");
      c.finish();
      cfg.checks.push_back(p);
    }
  } else {
    root.skip("checks");
    InequalityParams p;
    p.id = InequalityId::key1;
    cfg.checks.push_back(p);
    p.id = InequalityId::key2;
    for (double d : {0.1, 0.25}) {
      p.delta = d;
      cfg.checks.push_back(p);
    }
    p.id = InequalityId::interp_morrey;
    p.delta = 0.25;
    for (double w : {1.0, 0.1, 0.01}) {
      p.eps_weight = w;
      cfg.checks.push_back(p);
    }
  }
  root.finish();
  if (cfg.heldout_seed == e.seed) throw ConfigError("heldout_seed", "must differ from seed");
  return cfg;
}

ScanConfig parse_scan_config(const json& j) {
  ScanConfig scan;
  Section root(j, "");
  scan.base = parse_run_config(root.at("base"));
  if (root.has("presets")) {
    const json& v = root.at("presets");
    if (!v.is_array()) throw ConfigError("presets", "expected an array of names");
    const auto names = preset_names();
    for (const auto& p : v) {
      if (!p.is_string()) throw ConfigError("presets", "expected an array of names");
      const auto name = p.get<std::string>();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ConfigError("presets", "unknown preset '" + name + "'");
      }
      scan.presets.push_back(name);
    }
  } else {
    root.skip("presets");
  }
  for (double r : root.numbers("r")) {
    if (r < 1.0 || r != std::floor(r)) throw ConfigError("r", "entries must be integers >= 1");
    scan.exponents.push_back(static_cast<int>(r));
  }
  if (root.has("diffusion")) {
    const json& v = root.at("diffusion");
    if (!v.is_array()) throw ConfigError("diffusion", "expected an array of arrays");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_array()) throw ConfigError("diffusion[" + std::to_string(k) + "]", "expected an array");
      std::vector<double> d;
      for (const auto& x : v[k]) {
        if (!x.is_number() || !(x.get<double>() > 0.0)) {
          throw ConfigError("diffusion[" + std::to_string(k) + "]", "entries must be positive numbers");
        }
        d.push_back(x.get<double>());
      }
      scan.diffusions.push_back(std::move(d));
    }
  } else {
    root.skip("diffusion");
  }
  scan.peaks = root.numbers("peak");
  for (double p : scan.peaks) {
    if (!(p >= 0.0)) throw ConfigError("peak", "entries must be >= 0");
  }
  for (double s : root.numbers("seeds")) {
    if (s < 0.0 || s != std::floor(s)) throw ConfigError("seeds", "entries must be nonnegative integers");
    scan.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  root.finish();

  if (scan.presets.empty()) scan.presets.push_back(scan.base.preset);
  if (!scan.exponents.empty()) {
    for (const auto& p : scan.presets) {
      if (p != "exchange") throw ConfigError("r", "the r axis applies to the 'exchange' preset only");
    }
  }
  return scan;
}

std::vector<ScanRow> expand_scan(const ScanConfig& scan) {
  std::vector<std::optional<int>> exps;
  for (int r : scan.exponents) exps.emplace_back(r);
  if (exps.empty()) exps.emplace_back(std::nullopt);
  auto diffusions = scan.diffusions;
  if (diffusions.empty()) diffusions.push_back(scan.base.preset_options.diffusion);
  auto peaks = scan.peaks;
  if (peaks.empty()) peaks.push_back(scan.base.initial.peak);
  auto seeds = scan.seeds;
  if (seeds.empty()) seeds.push_back(scan.base.seed);

  std::vector<ScanRow> rows;
  for (const auto& preset : scan.presets) {
    for (const auto& r : exps) {
      for (const auto& d : diffusions) {
        for (double peak : peaks) {
          for (std::uint64_t seed : seeds) {
            ScanRow row;
            row.index = rows.size();
            row.preset = preset;
            row.exponent = r;
            row.diffusion = d;
            row.peak = peak;
            row.seed = seed;
            row.config = scan.base;
            if (preset != scan.base.preset) row.config.custom_system = nullptr;
            row.config.preset = preset;
            if (r) row.config.preset_options.exponent = *r;
            row.config.preset_options.diffusion = d;
            if (!row.config.custom_system.is_null() && !d.empty()) row.config.custom_system["d"] = d;
            row.config.initial.peak = peak;
            row.config.seed = seed;
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace rdv
