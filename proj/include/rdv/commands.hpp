#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "rdv/config.hpp"
#include "rdv/solver.hpp"

namespace rdv {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitBlownUp = 2, kExitViolation = 3 };

/// Command-line overrides shared by every subcommand.
struct CommandOptions {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int jobs = 0;  // 0: OpenMP default
  std::optional<std::string> preset;
  std::optional<std::size_t> grid_n;
  std::optional<double> final_time;
};

/// --out, else $RD_VERIFY_OUT, else ./rdv_out.
std::filesystem::path output_root(const CommandOptions& opts);

/// The config file (or built-in defaults) with the command-line overrides applied.
RunConfig resolve_run_config(const CommandOptions& opts);

/// Runs one simulation and writes snapshots plus manifest.json into `dir`.
Trajectory run_simulation(const RunConfig& cfg, const std::filesystem::path& dir);

/// Reads the trajectory in `traj_dir`, writes morrey.csv, holder.csv,
/// energy.csv, duality.csv and summary.json into `out_dir`, and returns the
/// summary. `spec` overrides the diagnostics section stored in the manifest.
nlohmann::json diagnose_directory(const std::filesystem::path& traj_dir, const std::filesystem::path& out_dir,
                                  const std::optional<DiagnosticsSpec>& spec = std::nullopt);

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::string& traj_dir, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_scan(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace rdv
