#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rdv/solver.hpp"

namespace rdv {

inline constexpr std::string_view kToolVersion = "rdverify 1.0.0";

class TrajectoryIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `text` and returns its SHA-256.
std::string write_text_file(const std::filesystem::path& path, const std::string& text);

/// "x,u1,...,um" followed by one row per node, 17-digit round-trip numbers.
std::string snapshot_csv(const StateVector& s);

/// Snapshot files snapshot_00000.csv, ... in `dir`. Returns the manifest
/// entries {file, time, sha256}.
nlohmann::json write_snapshots(const std::filesystem::path& dir, const Trajectory& traj);

/// Reads manifest.json and the snapshot files it lists, verifying every
/// checksum. Throws TrajectoryIoError on any missing or corrupt file.
Trajectory read_trajectory(const std::filesystem::path& dir, nlohmann::json* manifest_out = nullptr);

}  // namespace rdv
