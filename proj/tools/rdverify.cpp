// Command-line driver: simulate, diagnose, verify, scan.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rdv/commands.hpp"
#include "rdv/trajectory_io.hpp"

namespace {

void add_common(CLI::App* cmd, rdv::CommandOptions& opts, std::uint64_t& seed, std::size_t& grid_n, double& T,
                std::string& preset) {
  cmd->add_option("--config", opts.config, "JSON config file");
  cmd->add_option("--out", opts.out, "output directory (default: $RD_VERIFY_OUT or ./rdv_out)");
  cmd->add_option("--seed", seed, "seed, overrides the config");
  cmd->add_option("--jobs", opts.jobs, "worker threads, 0 for the OpenMP default")->check(CLI::NonNegativeNumber);
  cmd->add_option("--preset", preset, "system preset, overrides the config");
  cmd->add_option("--grid-n", grid_n, "number of grid nodes, overrides the config");
  cmd->add_option("--T", T, "final time, overrides the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion simulation and verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rdv::kToolVersion));

  rdv::CommandOptions opts;
  std::uint64_t seed = 0;
  std::size_t grid_n = 0;
  double T = 0.0;
  std::string preset;
  std::string traj_dir;

  auto* simulate = app.add_subcommand("simulate", "run one simulation and write snapshots + manifest");
  auto* diagnose = app.add_subcommand("diagnose", "Morrey, Hoelder, energy and duality diagnostics of a run");
  auto* verify = app.add_subcommand("verify", "calibrate and validate the functional inequalities");
  auto* scan = app.add_subcommand("scan", "run a parameter grid of simulations");
  for (auto* cmd : {simulate, diagnose, verify, scan}) add_common(cmd, opts, seed, grid_n, T, preset);
  diagnose->add_option("trajectory", traj_dir, "directory written by simulate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rdv::kExitError;
  }

  for (auto* cmd : {simulate, diagnose, verify, scan}) {
    if (cmd->count("--seed")) opts.seed = seed;
    if (cmd->count("--grid-n")) opts.grid_n = grid_n;
    if (cmd->count("--T")) opts.final_time = T;
    if (cmd->count("--preset")) opts.preset = preset;
  }

  if (*simulate) return rdv::cmd_simulate(opts, std::cout, std::cerr);
  if (*diagnose) return rdv::cmd_diagnose(traj_dir, opts, std::cout, std::cerr);
  if (*verify) return rdv::cmd_verify(opts, std::cout, std::cerr);
  return rdv::cmd_scan(opts, std::cout, std::cerr);
}
