#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "ckdv/solver.hpp"

namespace ckdv {

/// "%.17g": round-trips every double.
std::string format_number(double v);
/// "%.6g": used for times embedded in file names.
std::string format_time(double t);

/// Tab-delimited snapshot: '#' header lines with time, step, scheme and grid,
/// then one row per grid point: x, theta^{n1}, theta^{n2}, ...
void write_snapshot(std::ostream& os, const ModeState& state, const Grid& grid,
                    Scheme scheme, std::size_t step);

struct SnapshotData {
  ModeState state;
  Grid grid;
  std::size_t step = 0;
  std::string scheme;
};

SnapshotData read_snapshot(std::istream& is);

/// Two columns x, theta^n for the mode in `slot`.
void write_mode_profile(std::ostream& os, const ModeState& state, const Grid& grid,
                        std::size_t slot);

std::string snapshot_filename(const std::string& run_id, double time);
std::string mode_profile_filename(const std::string& run_id, double time, int mode);
std::string field_filename(const std::string& run_id, double time);

/// Opens `path` for writing; throws IoError naming the path on failure.
void write_text_file(const std::filesystem::path& path,
                     const std::function<void(std::ostream&)>& body);

struct RunMetadata {
  std::string run_id;
  std::string subcommand;
  std::string resolved_config;  // config file text that reproduces the run
  std::map<std::string, std::string> summary;
  const RunReport* report = nullptr;
  double wall_seconds = 0.0;
};

/// JSON sidecar; the only output that carries timing.
void write_metadata(const std::filesystem::path& path, const RunMetadata& meta);

}  // namespace ckdv
