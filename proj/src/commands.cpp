#include "rdv/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "rdv/energy.hpp"
#include "rdv/inequalities.hpp"
#include "rdv/morrey.hpp"
#include "rdv/trajectory_io.hpp"

namespace rdv {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path output_root(const CommandOptions& opts) {
  if (opts.out) return *opts.out;
  if (const char* env = std::getenv("RD_VERIFY_OUT"); env && *env) return env;
  return "rdv_out";
}

RunConfig resolve_run_config(const CommandOptions& opts) {
  RunConfig cfg;
  if (opts.config) cfg = parse_run_config(load_json_file(*opts.config));
  if (opts.preset) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), *opts.preset) == names.end()) {
      throw ConfigError("--preset", "unknown preset '" + *opts.preset + "'");
    }
    cfg.preset = *opts.preset;
  }
  if (opts.grid_n) {
    if (*opts.grid_n < 3) throw ConfigError("--grid-n", "need at least 3 nodes");
    cfg.nodes = *opts.grid_n;
  }
  if (opts.final_time) {
    if (!(*opts.final_time > 0.0)) throw ConfigError("--T", "must be positive");
    cfg.final_time = *opts.final_time;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json dt_statistics(const Trajectory& traj) {
  const auto& h = traj.dt_history;
  json out = {{"accepted_steps", h.size()}, {"rejected_steps", traj.rejected_steps}};
  if (h.empty()) {
    out["min"] = nullptr;
    out["max"] = nullptr;
    out["mean"] = nullptr;
    return out;
  }
  double sum = 0.0;
  for (double d : h) sum += d;
  out["min"] = *std::min_element(h.begin(), h.end());
  out["max"] = *std::max_element(h.begin(), h.end());
  out["mean"] = sum / static_cast<double>(h.size());
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string join(const std::vector<double>& v, char sep) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += sep;
    out += format_real(v[k]);
  }
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// Writes a file in `dir` and records it in `files`.
void emit(const fs::path& dir, const std::string& name, const std::string& text, json& files) {
  files.push_back({{"name", name}, {"sha256", write_text_file(dir / name, text)}});
}

/// The last three columns repeat the run-level values on every row.
std::string morrey_csv(const MorreySeries& s, const std::string& gamma, double delta) {
  std::string out = "t,morrey_z";
  for (std::size_t i = 0; i < s.species.size(); ++i) out += ",morrey_u" + std::to_string(i + 1);
  out += ",holder_gamma,delta,nonconcentration_ratio\n";
  const std::string tail = "," + gamma + "," + format_real(delta) + "," + format_real(s.nonconcentration_ratio);
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out += format_real(s.times[k]) + "," + format_real(s.z[k]);
    for (const auto& sp : s.species) out += "," + format_real(sp[k]);
    out += tail + '\n';
  }
  return out;
}

std::string holder_csv(const HolderEstimate& h) {
  return "gamma,constant,fit_residual,pairs,violation_fraction,degenerate\n" + format_real(h.gamma) + "," +
         format_real(h.constant) + "," + format_real(h.fit_residual) + "," + std::to_string(h.pair_count) + "," +
         format_real(h.violation_fraction) + "," + (h.degenerate ? "1" : "0") + "\n";
}

std::string energy_csv(const EnergyMonitor& m) {
  std::string out = "t,E_p,dE_dt,grad_term,rhs_term,ratio\n";
  for (const auto& s : m.samples) {
    out += format_real(s.t) + "," + format_real(s.energy) + "," + format_real(s.denergy_dt) + "," +
           format_real(s.grad_term) + "," + format_real(s.rhs_term) + "," + format_real(s.ratio) + "\n";
  }
  return out;
}

/// Consecutive windows of length `window` from the first snapshot time, plus
/// the running total from the start to each window end.
std::string duality_csv(const Trajectory& traj, double window) {
  const std::size_t m = traj.snapshots.front().species_count();
  std::string out = "tau,T";
  for (std::size_t i = 0; i < m; ++i) out += ",window_u" + std::to_string(i + 1);
  for (std::size_t i = 0; i < m; ++i) out += ",cumulative_u" + std::to_string(i + 1);
  out += '\n';
  const double t0 = traj.start_time(), t1 = traj.end_time();
  if (!(t1 > t0)) return out;
  const double tol = 1e-9 * std::max(1.0, std::abs(t1));
  std::vector<std::pair<double, double>> windows;
  for (std::size_t k = 0;; ++k) {
    const double a = t0 + static_cast<double>(k) * window;
    const double b = t0 + static_cast<double>(k + 1) * window;
    if (b > t1 + tol) break;
    windows.emplace_back(a, std::min(b, t1));
  }
  if (windows.empty()) windows.emplace_back(t0, t1);
  for (const auto& [a, b] : windows) {
    const auto local = spacetime_l2(traj, a, b);
    const auto total = spacetime_l2(traj, t0, b);
    out += format_real(a) + "," + format_real(b) + "," + join(local, ',') + "," + join(total, ',') + "\n";
  }
  return out;
}

double sup_linf(const Trajectory& traj) {
  double s = 0.0;
  for (const auto& st : traj.snapshots) s = std::max(s, st.max_norm());
  return s;
}

}  // namespace

Trajectory run_simulation(const RunConfig& cfg, const fs::path& dir) {
  const ReactionSystem sys = build_system(cfg);
  const StateVector u0 = build_initial_state(cfg, sys.species_count());
  fs::create_directories(dir);

  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj = simulate(sys, u0, cfg.final_time, cfg.solver);
  const double wall = elapsed_seconds(t0);

  const json config = to_json(cfg);
  json manifest;
  manifest["version"] = kToolVersion;
  manifest["seed"] = cfg.seed;
  manifest["config"] = config;
  manifest["input_sha256"] = sha256_hex(config.dump());
  manifest["termination"] = to_string(traj.termination);
  if (traj.blowup) {
    manifest["blowup"] = {{"time", traj.blowup->time}, {"species", traj.blowup->species},
                          {"norm", number_or_null(traj.blowup->norm)}};
  } else {
    manifest["blowup"] = nullptr;
  }
  manifest["failure_reason"] = traj.failure_reason;
  manifest["wall_time_s"] = wall;
  manifest["grid"] = {{"L", cfg.length}, {"n", cfg.nodes}};
  manifest["diffusion"] = traj.diffusion;
  manifest["dt_stats"] = dt_statistics(traj);
  manifest["snapshots"] = write_snapshots(dir, traj);
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return traj;
}

json diagnose_directory(const fs::path& traj_dir, const fs::path& out_dir, const std::optional<DiagnosticsSpec>& spec) {
  json manifest;
  const Trajectory traj = read_trajectory(traj_dir, &manifest);
  RunConfig cfg;
  try {
    cfg = parse_run_config(manifest.at("config"));
  } catch (const std::exception& e) {
    throw TrajectoryIoError("manifest.json config: " + std::string(e.what()));
  }
  const DiagnosticsSpec diag = spec ? *spec : cfg.diagnostics;
  fs::create_directories(out_dir);

  json summary;
  json files = json::array();
  json problems = json::array();
  summary["termination"] = to_string(traj.termination);
  summary["snapshots"] = traj.snapshots.size();
  summary["t_end"] = traj.end_time();
  summary["sup_linf"] = number_or_null(sup_linf(traj));

  std::optional<HolderEstimate> holder;
  try {
    const AuxiliaryFields aux = auxiliary_fields(traj, traj.start_time());
    holder = estimate_holder(aux.y, diag.holder);
    emit(out_dir, "holder.csv", holder_csv(*holder), files);
  } catch (const std::exception& e) {
    problems.push_back(std::string("holder: ") + e.what());
  }
  if (holder) {
    summary["gamma"] = holder->gamma;
    summary["holder_constant"] = number_or_null(holder->constant);
    summary["holder_degenerate"] = holder->degenerate;
    summary["holder_pairs"] = holder->pair_count;
  } else {
    summary["gamma"] = nullptr;
    summary["holder_degenerate"] = nullptr;
  }
  const double delta = diag.morrey_delta ? *diag.morrey_delta : delta_from_gamma(holder ? holder->gamma : 1.0);
  summary["delta"] = delta;
  summary["delta_source"] = diag.morrey_delta ? "config" : (holder ? "holder" : "default");

  try {
    MorreyParams mp;
    mp.delta = delta;
    mp.octaves = diag.morrey_octaves;
    mp.radii_per_octave = diag.morrey_radii_per_octave;
    const MorreySeries series = track_morrey(traj, mp);
    emit(out_dir, "morrey.csv", morrey_csv(series, holder ? format_real(holder->gamma) : "", delta), files);
    summary["sup_morrey_z"] = number_or_null(series.sup_z);
    json per_species = json::array();
    for (double v : series.sup_species) per_species.push_back(number_or_null(v));
    summary["sup_morrey_species"] = per_species;
    summary["nonconcentration_ratio"] = number_or_null(series.nonconcentration_ratio);
  } catch (const std::exception& e) {
    problems.push_back(std::string("morrey: ") + e.what());
    summary["sup_morrey_z"] = nullptr;
    summary["nonconcentration_ratio"] = nullptr;
  }

  try {
    std::vector<double> theta = diag.energy_theta;
    if (theta.empty()) theta.assign(traj.diffusion.size(), 1.0);
    const ReactionSystem sys = build_system(cfg);
    const double r = diag.energy_r ? *diag.energy_r : std::max(1.0, sys.growth_order());
    const double alpha =
        diag.energy_alpha ? *diag.energy_alpha : *std::min_element(traj.diffusion.begin(), traj.diffusion.end());
    const EnergyMonitor mon = energy_dissipation_monitor(traj, diag.energy_p, theta, r, alpha);
    emit(out_dir, "energy.csv", energy_csv(mon), files);
    summary["energy"] = {{"p", diag.energy_p}, {"r", r}, {"alpha_trial", alpha},
                         {"sup_ratio", number_or_null(mon.sup_ratio)}};
  } catch (const std::exception& e) {
    problems.push_back(std::string("energy: ") + e.what());
    summary["energy"] = nullptr;
  }

  try {
    emit(out_dir, "duality.csv", duality_csv(traj, diag.duality_window), files);
  } catch (const std::exception& e) {
    problems.push_back(std::string("duality: ") + e.what());
  }

  summary["diagnostics"] = to_json(diag);
  summary["problems"] = problems;
  summary["files"] = files;
  summary["version"] = kToolVersion;
  write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = resolve_run_config(opts);
    const fs::path dir = output_root(opts);
    const Trajectory traj = run_simulation(cfg, dir);
    out << cfg.preset << ": " << to_string(traj.termination) << " at t=" << format_real(traj.end_time()) << ", "
        << traj.snapshots.size() << " snapshots in " << dir.string() << "\n";
    switch (traj.termination) {
      case Termination::completed: return kExitOk;
      case Termination::blown_up:
        out << "blow-up: species " << traj.blowup->species + 1 << " at t*=" << format_real(traj.blowup->time)
            << "\n";
        return kExitBlownUp;
      case Termination::step_failure:
        err << "step failure: " << traj.failure_reason << "\n";
        return kExitError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int cmd_diagnose(const std::string& traj_dir, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    std::optional<DiagnosticsSpec> spec;
    if (opts.config) {
      const json j = load_json_file(*opts.config);
      spec = j.contains("diagnostics") ? parse_diagnostics(j.at("diagnostics")) : parse_diagnostics(json::object());
    }
    const fs::path out_dir = opts.out ? fs::path(*opts.out) : fs::path(traj_dir);
    const json summary = diagnose_directory(traj_dir, out_dir, spec);
    out << "gamma=" << summary["gamma"].dump() << " delta=" << summary["delta"].dump()
        << " sup_morrey_z=" << summary["sup_morrey_z"].dump()
        << " nonconcentration=" << summary["nonconcentration_ratio"].dump() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    VerifyConfig cfg = opts.config ? parse_verify_config(load_json_file(*opts.config))
                                   : parse_verify_config(json{{"grid", {{"L", 1.0}, {"n", 201}}}});
    if (opts.seed) {
      cfg.ensemble.seed = *opts.seed;
      if (cfg.heldout_seed == cfg.ensemble.seed) cfg.heldout_seed = cfg.ensemble.seed + 1;
    }
    if (opts.grid_n) {
      if (*opts.grid_n < 3) throw ConfigError("--grid-n", "need at least 3 nodes");
      cfg.nodes = *opts.grid_n;
    }
    const fs::path dir = output_root(opts);
    fs::create_directories(dir);
    const Grid1D grid(cfg.length, cfg.nodes);

    json reports = json::array();
    std::size_t failed = 0;
    std::optional<std::vector<Field>> heldout;
    for (std::size_t k = 0; k < cfg.checks.size(); ++k) {
      const InequalityParams& p = cfg.checks[k];
      const InequalityReport r =
          run_inequality_check(grid, cfg.ensemble, cfg.heldout_seed, p, cfg.safety_factor, cfg.calibration_scale);
      json rep = {{"inequality", r.inequality},       {"delta", r.delta},
                  {"eps_weight", r.eps_weight},       {"samples", r.samples},
                  {"max_ratio", r.max_ratio},         {"calibrated_C", r.calibrated_c},
                  {"violations", r.violations},       {"heldout_max_ratio", r.heldout_max_ratio},
                  {"seed", r.seed},                   {"heldout_seed", r.heldout_seed},
                  {"witness", r.witness ? json(*r.witness) : json(nullptr)}};
      out << r.inequality << " delta=" << format_real(r.delta) << " eps=" << format_real(r.eps_weight)
          << " max_ratio=" << format_real(r.max_ratio) << " C=" << format_real(r.calibrated_c)
          << " violations=" << r.violations << "\n";
      if (r.violations > 0) {
        ++failed;
        if (!heldout) {
          EnsembleSpec spec = cfg.ensemble;
          spec.seed = cfg.heldout_seed;
          heldout = generate_ensemble(grid, spec);
        }
        const std::string name = "witness_" + std::to_string(k) + "_" + r.inequality + ".csv";
        std::ostringstream csv;
        write_csv(csv, (*heldout)[*r.witness]);
        write_text_file(dir / name, csv.str());
        rep["witness_file"] = name;
        err << "violation: " << r.inequality << " held-out sample " << *r.witness << " written to "
            << (dir / name).string() << "\n";
      }
      reports.push_back(std::move(rep));
    }
    json report = {{"version", kToolVersion},
                   {"grid", {{"L", cfg.length}, {"n", cfg.nodes}}},
                   {"ensemble",
                    {{"kind", to_string(cfg.ensemble.kind)},
                     {"samples", cfg.ensemble.sample_count},
                     {"mode_count", cfg.ensemble.mode_count},
                     {"bump_count", cfg.ensemble.bump_count},
                     {"amplitude_min", cfg.ensemble.amplitude_min},
                     {"amplitude_max", cfg.ensemble.amplitude_max},
                     {"min_width", cfg.ensemble.min_width},
                     {"seed", cfg.ensemble.seed},
                     {"heldout_seed", cfg.heldout_seed}}},
                   {"safety_factor", cfg.safety_factor},
                   {"calibration_scale", cfg.calibration_scale},
                   {"reports", reports},
                   {"pass", failed == 0}};
    write_text_file(dir / "verify_report.json", report.dump(2) + "\n");
    return failed == 0 ? kExitOk : kExitViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_scan(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (!opts.config) throw ConfigError("--config", "scan needs a config file");
    ScanConfig scan = parse_scan_config(load_json_file(*opts.config));
    if (opts.preset) scan.presets = {*opts.preset};
    if (opts.grid_n) scan.base.nodes = *opts.grid_n;
    if (opts.final_time) scan.base.final_time = *opts.final_time;
    if (opts.seed) scan.seeds = {*opts.seed};
    const std::vector<ScanRow> rows = expand_scan(scan);
    const fs::path dir = output_root(opts);
    fs::create_directories(dir);

    struct RowResult {
      bool ok = false;
      std::string message;
      std::string termination;
      std::vector<double> diffusion;
      json summary;
    };
    std::vector<RowResult> results(rows.size());
    const auto count = static_cast<std::ptrdiff_t>(rows.size());
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const ScanRow& row = rows[static_cast<std::size_t>(k)];
      RowResult& res = results[static_cast<std::size_t>(k)];
      char name[32];
      std::snprintf(name, sizeof name, "row_%04zu", row.index);
      try {
        const Trajectory traj = run_simulation(row.config, dir / name);
        res.termination = to_string(traj.termination);
        res.diffusion = traj.diffusion;
        res.summary = diagnose_directory(dir / name, dir / name);
        res.ok = true;
      } catch (const std::exception& e) {
        res.message = e.what();
      }
    }

    std::string csv =
        "row,preset,r,diffusion,peak,seed,termination,t_end,sup_linf,sup_morrey_z,nonconcentration_ratio,gamma,"
        "delta,status,message\n";
    auto field = [](const json& j, const char* key) {
      if (!j.is_object() || !j.contains(key) || j[key].is_null()) return std::string();
      return format_real(j[key].get<double>());
    };
    std::size_t errors = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const ScanRow& row = rows[k];
      const RowResult& res = results[k];
      if (!res.ok) ++errors;
      const auto& diffusion = res.diffusion.empty() ? row.diffusion : res.diffusion;
      csv += std::to_string(row.index) + "," + row.preset + "," + (row.exponent ? std::to_string(*row.exponent) : "") +
             "," + join(diffusion, ';') + "," + format_real(row.peak) + "," + std::to_string(row.seed) + "," +
             res.termination + "," + field(res.summary, "t_end") + "," + field(res.summary, "sup_linf") + "," +
             field(res.summary, "sup_morrey_z") + "," + field(res.summary, "nonconcentration_ratio") + "," +
             field(res.summary, "gamma") + "," + field(res.summary, "delta") + "," + (res.ok ? "ok" : "error") +
             "," + csv_escape(res.message) + "\n";
    }
    write_text_file(dir / "scan.csv", csv);
    out << rows.size() << " rows, " << errors << " errors, table in " << (dir / "scan.csv").string() << "\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (!results[k].ok) err << "row " << k << ": " << results[k].message << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace rdv
