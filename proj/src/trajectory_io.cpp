#include "rdv/trajectory_io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace rdv {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int k = 0; k < len; ++k) {
    out[2 * k] = hex[digest[k] >> 4];
    out[2 * k + 1] = hex[digest[k] & 0xf];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrajectoryIoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw TrajectoryIoError(where + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

StateVector parse_snapshot(const std::string& text, const Grid1D& grid, std::size_t species, double time,
                           const std::string& name) {
  std::vector<std::vector<double>> cols(species, std::vector<double>(grid.size()));
  std::size_t row = 0;
  bool header = true;
  std::string_view all(text);
  std::size_t start = 0;
  while (start < all.size()) {
    auto end = all.find('\n', start);
    if (end == std::string_view::npos) end = all.size();
    std::string_view line = all.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != species + 1) {
      throw TrajectoryIoError(name + ": expected " + std::to_string(species + 1) + " columns");
    }
    if (header) {
      if (fields[0] != "x") throw TrajectoryIoError(name + ": missing header");
      header = false;
      continue;
    }
    if (row >= grid.size()) throw TrajectoryIoError(name + ": too many rows");
    const std::string where = name + " row " + std::to_string(row + 1);
    const double x = parse_number(fields[0], where);
    if (std::abs(x - grid.node(row)) > 1e-9 * grid.length()) {
      throw TrajectoryIoError(where + ": node position does not match the grid");
    }
    for (std::size_t i = 0; i < species; ++i) cols[i][row] = parse_number(fields[i + 1], where);
    ++row;
  }
  if (row != grid.size()) throw TrajectoryIoError(name + ": expected " + std::to_string(grid.size()) + " rows");
  std::vector<Field> fields;
  for (auto& c : cols) fields.emplace_back(grid, std::move(c));
  return make_state(time, std::move(fields));
}

Termination parse_termination(const std::string& s) {
  if (s == "completed") return Termination::completed;
  if (s == "blown_up") return Termination::blown_up;
  if (s == "step_failure") return Termination::step_failure;
  throw TrajectoryIoError("manifest: unknown termination '" + s + "'");
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TrajectoryIoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw TrajectoryIoError("write failed for " + path.string());
  return sha256_hex(text);
}

std::string snapshot_csv(const StateVector& s) {
  std::string out = "x";
  for (std::size_t i = 0; i < s.species_count(); ++i) out += ",u" + std::to_string(i + 1);
  out += '\n';
  const Grid1D& grid = s.grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out += format_real(grid.node(k));
    for (const auto& f : s.species) {
      out += ',';
      out += format_real(f[k]);
    }
    out += '\n';
  }
  return out;
}

json write_snapshots(const fs::path& dir, const Trajectory& traj) {
  json entries = json::array();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
    const auto sha = write_text_file(dir / name, snapshot_csv(traj.snapshots[k]));
    entries.push_back({{"file", name}, {"time", traj.snapshots[k].time}, {"sha256", sha}});
  }
  return entries;
}

Trajectory read_trajectory(const fs::path& dir, json* manifest_out) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::is_directory(dir)) throw TrajectoryIoError(dir.string() + " is not a directory");
  if (!fs::exists(manifest_path)) throw TrajectoryIoError("no manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw TrajectoryIoError("manifest.json: " + std::string(e.what()));
  }
  Trajectory traj;
  try {
    const Grid1D grid(manifest.at("grid").at("L").get<double>(), manifest.at("grid").at("n").get<std::size_t>());
    traj.diffusion = manifest.at("diffusion").get<std::vector<double>>();
    const std::size_t species = traj.diffusion.size();
    if (species == 0) throw TrajectoryIoError("manifest: no species");
    for (const auto& entry : manifest.at("snapshots")) {
      const auto name = entry.at("file").get<std::string>();
      const std::string text = read_file(dir / name);
      if (sha256_hex(text) != entry.at("sha256").get<std::string>()) {
        throw TrajectoryIoError(name + ": checksum mismatch");
      }
      traj.snapshots.push_back(parse_snapshot(text, grid, species, entry.at("time").get<double>(), name));
    }
    traj.termination = parse_termination(manifest.at("termination").get<std::string>());
    if (manifest.contains("blowup") && !manifest["blowup"].is_null()) {
      const auto& b = manifest["blowup"];
      traj.blowup = BlowUp{b.at("time").get<double>(), b.at("species").get<std::size_t>(),
                           b.at("norm").get<double>()};
    }
  } catch (const json::exception& e) {
    throw TrajectoryIoError("manifest.json: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw TrajectoryIoError("manifest.json: " + std::string(e.what()));
  }
  if (traj.snapshots.empty()) throw TrajectoryIoError("manifest lists no snapshots");
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    if (!(traj.snapshots[k].time > traj.snapshots[k - 1].time)) {
      throw TrajectoryIoError("snapshot times are not increasing");
    }
  }
  if (manifest_out) *manifest_out = std::move(manifest);
  return traj;
}

}  // namespace rdv
