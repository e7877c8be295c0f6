#include "ckdv/snapshot_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <vector>

#include "ckdv/error.hpp"

namespace ckdv {

std::string format_number(double v) {
  char buf[40];
  // Collapse -0 so sign-of-zero noise does not leak into tables.
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string format_time(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

void write_snapshot(std::ostream& os, const ModeState& state, const Grid& grid,
                    Scheme scheme, std::size_t step) {
  if (state.n_points() != grid.n_points) {
    throw ConfigError("write_snapshot: grid does not match state");
  }
  os << "# time\t" << format_number(state.time) << '\n'
     << "# step\t" << step << '\n'
     << "# scheme\t" << to_string(scheme) << '\n'
     << "# grid\tdx=" << format_number(grid.dx) << "\tn_points=" << grid.n_points
     << "\tx0=" << format_number(grid.x0) << "\tperiodic=1\n"
     << "# x";
  for (int n : state.mode_indices()) os << "\ttheta" << n;
  os << '\n';
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    os << format_number(grid.x(i));
    for (std::size_t s = 0; s < state.mode_count(); ++s) {
      os << '\t' << format_number(state.mode(s)[i]);
    }
    os << '\n';
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw IoError("snapshot: malformed number '" + s + "'");
  return v;
}

std::string value_after(const std::string& field, const std::string& key) {
  if (field.rfind(key + "=", 0) != 0) {
    throw IoError("snapshot: expected '" + key + "=' in grid header");
  }
  return field.substr(key.size() + 1);
}

}  // namespace

SnapshotData read_snapshot(std::istream& is) {
  SnapshotData out;
  double time = 0.0;
  std::vector<int> modes;
  std::vector<std::vector<double>> rows;
  std::string line;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto f = split_tabs(line);
      if (line[0] == '#') {
        if (f[0] == "# time") time = parse_double(f.at(1));
        else if (f[0] == "# step") out.step = std::stoul(f.at(1));
        else if (f[0] == "# scheme") out.scheme = f.at(1);
        else if (f[0] == "# grid") {
          out.grid.dx = parse_double(value_after(f.at(1), "dx"));
          out.grid.n_points = std::stoul(value_after(f.at(2), "n_points"));
          out.grid.x0 = parse_double(value_after(f.at(3), "x0"));
        } else if (f[0] == "# x") {
          for (std::size_t c = 1; c < f.size(); ++c) {
            if (f[c].rfind("theta", 0) != 0) throw IoError("snapshot: bad column header");
            modes.push_back(std::stoi(f[c].substr(5)));
          }
        }
        continue;
      }
      std::vector<double> row;
      for (const auto& s : f) row.push_back(parse_double(s));
      if (row.size() != modes.size() + 1) throw IoError("snapshot: ragged row");
      rows.push_back(std::move(row));
    }
  } catch (const std::logic_error& e) {
    throw IoError(std::string("snapshot: malformed input (") + e.what() + ")");
  }
  if (rows.size() != out.grid.n_points) {
    throw IoError("snapshot: row count does not match grid header");
  }
  out.state = ModeState(modes, rows.size(), time);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t s = 0; s < modes.size(); ++s) out.state.mode(s)[i] = rows[i][s + 1];
  return out;
}

void write_mode_profile(std::ostream& os, const ModeState& state, const Grid& grid,
                        std::size_t slot) {
  if (slot >= state.mode_count() || state.n_points() != grid.n_points) {
    throw ConfigError("write_mode_profile: slot or grid does not match state");
  }
  os << "# time\t" << format_number(state.time) << '\n'
     << "# mode\t" << state.mode_indices()[slot] << '\n'
     << "# x\ttheta\n";
  const auto v = state.mode(slot);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    os << format_number(grid.x(i)) << '\t' << format_number(v[i]) << '\n';
  }
}

std::string snapshot_filename(const std::string& run_id, double time) {
  return run_id + "_t" + format_time(time) + "_modes.dat";
}

std::string mode_profile_filename(const std::string& run_id, double time, int mode) {
  return run_id + "_t" + format_time(time) + "_mode" + std::to_string(mode) + ".dat";
}

std::string field_filename(const std::string& run_id, double time) {
  return run_id + "_t" + format_time(time) + "_field.dat";
}

void write_text_file(const std::filesystem::path& path,
                     const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

void write_metadata(const std::filesystem::path& path, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["run_id"] = meta.run_id;
  j["subcommand"] = meta.subcommand;
  j["config"] = meta.resolved_config;
  j["summary"] = meta.summary;
  if (meta.report) {
    const RunReport& r = *meta.report;
    j["scheme"] = to_string(r.scheme);
    j["tau"] = r.tau;
    j["steps"] = r.steps;
    j["warnings"] = r.warnings;
    auto& series = j["conserved"] = nlohmann::ordered_json::array();
    for (const auto& s : r.series) {
      series.push_back({{"step", s.step}, {"time", s.time}, {"mass", s.mass},
                        {"energy", s.energy}});
    }
  }
  j["wall_seconds"] = meta.wall_seconds;
  write_text_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

}  // namespace ckdv
