#include "ckdv/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"

namespace ckdv {

double FieldSnapshot::max_abs() const {
  double m = 0.0;
  for (double v : psi) m = std::max(m, std::abs(v));
  return m;
}

double FieldSnapshot::max_wall_abs() const {
  double m = 0.0;
  if (z.empty()) return m;
  const std::size_t nx = x.size();
  const std::size_t last = z.size() - 1;
  for (std::size_t i = 0; i < nx; ++i) {
    m = std::max({m, std::abs(at(0, i)), std::abs(at(last, i))});
  }
  return m;
}

FieldSnapshot synthesize(const ModeBasis& basis, const ModeState& state, const Grid& grid,
                         int z_points) {
  if (z_points < 2) throw ConfigError("synthesize: z_points must be >= 2");
  if (state.mode_indices() != basis.indices()) {
    throw ConfigError("synthesize: state and basis mode lists differ");
  }
  if (state.n_points() != grid.n_points) {
    throw ConfigError("synthesize: grid does not match state");
  }
  FieldSnapshot out;
  out.time = state.time;
  const double h = basis.stratification().depth;
  const auto nz = static_cast<std::size_t>(z_points);
  const std::size_t nx = grid.n_points;
  for (std::size_t q = 0; q < nz; ++q) {
    out.z.push_back(h * (static_cast<double>(q) / static_cast<double>(nz - 1)));
  }
  for (std::size_t i = 0; i < nx; ++i) out.x.push_back(grid.x(i));

  out.psi.assign(nz * nx, 0.0);
  for (std::size_t q = 0; q < nz; ++q) {
    double* row = out.psi.data() + q * nx;
    for (std::size_t s = 0; s < basis.size(); ++s) {
      const double zq = basis.eigenfunction(s, out.z[q]);
      const auto theta = state.mode(s);
      for (std::size_t i = 0; i < nx; ++i) row[i] += zq * theta[i];
    }
  }
  return out;
}

FieldSnapshot slice_rows(const FieldSnapshot& snapshot, double z_lo, double z_hi) {
  FieldSnapshot out;
  out.time = snapshot.time;
  out.x = snapshot.x;
  const std::size_t nx = snapshot.x.size();
  for (std::size_t q = 0; q < snapshot.z.size(); ++q) {
    if (snapshot.z[q] < z_lo || snapshot.z[q] > z_hi) continue;
    out.z.push_back(snapshot.z[q]);
    out.psi.insert(out.psi.end(), snapshot.psi.begin() + static_cast<std::ptrdiff_t>(q * nx),
                   snapshot.psi.begin() + static_cast<std::ptrdiff_t>((q + 1) * nx));
  }
  return out;
}

CrossSection cross_section(const FieldSnapshot& snapshot, double x_fixed) {
  if (snapshot.x.empty() || !(x_fixed >= snapshot.x.front()) ||
      !(x_fixed <= snapshot.x.back())) {
    throw ConfigError("cross_section: x = " + format_number(x_fixed) +
                      " lies outside the field's x-range");
  }
  std::size_t best = 0;
  double best_dist = std::abs(snapshot.x[0] - x_fixed);
  for (std::size_t i = 1; i < snapshot.x.size(); ++i) {
    const double d = std::abs(snapshot.x[i] - x_fixed);
    if (d <= best_dist) {
      best = i;
      best_dist = d;
    }
  }
  CrossSection out;
  out.x_requested = x_fixed;
  out.x_used = snapshot.x[best];
  out.column = best;
  out.z = snapshot.z;
  for (std::size_t q = 0; q < snapshot.z.size(); ++q) out.psi.push_back(snapshot.at(q, best));
  return out;
}

std::string to_string(FieldFormat f) {
  return f == FieldFormat::grid_text ? "grid_text" : "column_text";
}

FieldFormat field_format_from_string(const std::string& name) {
  if (name == "grid_text") return FieldFormat::grid_text;
  if (name == "column_text") return FieldFormat::column_text;
  throw ConfigError("unknown field format '" + name + "'");
}

void export_field(std::ostream& os, const FieldSnapshot& snapshot, FieldFormat format) {
  const std::size_t nx = snapshot.x.size();
  const std::size_t nz = snapshot.z.size();
  if (snapshot.psi.size() != nx * nz) throw ConfigError("export_field: inconsistent field");
  os << "# time\t" << format_number(snapshot.time) << '\n'
     << "# format\t" << to_string(format) << '\n';
  if (format == FieldFormat::grid_text) {
    os << "z\\x";
    for (double x : snapshot.x) os << '\t' << format_number(x);
    os << '\n';
    for (std::size_t q = 0; q < nz; ++q) {
      os << format_number(snapshot.z[q]);
      for (std::size_t i = 0; i < nx; ++i) os << '\t' << format_number(snapshot.at(q, i));
      os << '\n';
    }
  } else {
    os << "# x\tz\tpsi\n";
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t q = 0; q < nz; ++q) {
        os << format_number(snapshot.x[i]) << '\t' << format_number(snapshot.z[q]) << '\t'
           << format_number(snapshot.at(q, i)) << '\n';
      }
  }
}

void export_field(const std::filesystem::path& path, const FieldSnapshot& snapshot,
                  FieldFormat format) {
  write_text_file(path, [&](std::ostream& os) { export_field(os, snapshot, format); });
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) {
    std::size_t used = 0;
    out.push_back(std::stod(field, &used));
    if (used != field.size()) throw IoError("field: malformed number '" + field + "'");
  }
  return out;
}

}  // namespace

FieldSnapshot import_field(std::istream& is) {
  FieldSnapshot out;
  std::string line;
  std::string format;
  std::vector<std::vector<double>> rows;
  std::vector<double> header_x;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (line.rfind("# time\t", 0) == 0) {
        out.time = std::stod(line.substr(7));
      } else if (line.rfind("# format\t", 0) == 0) {
        format = line.substr(9);
      } else if (line[0] == '#') {
        continue;
      } else if (line.rfind("z\\x", 0) == 0) {
        header_x = line.size() > 4 ? parse_row(line.substr(4)) : std::vector<double>{};
      } else {
        rows.push_back(parse_row(line));
      }
    }
  } catch (const std::logic_error& e) {
    throw IoError(std::string("field: malformed input (") + e.what() + ")");
  }

  if (format == "grid_text") {
    out.x = header_x;
    for (const auto& r : rows) {
      if (r.size() != out.x.size() + 1) throw IoError("field: ragged grid_text row");
      out.z.push_back(r[0]);
      out.psi.insert(out.psi.end(), r.begin() + 1, r.end());
    }
  } else if (format == "column_text") {
    // x-major triples: z cycles fastest.
    for (const auto& r : rows) {
      if (r.size() != 3) throw IoError("field: column_text rows need 3 values");
      if (out.x.empty() || r[0] != out.x.back()) out.x.push_back(r[0]);
      if (out.x.size() == 1) out.z.push_back(r[1]);
    }
    const std::size_t nx = out.x.size();
    const std::size_t nz = out.z.size();
    if (nx * nz != rows.size()) throw IoError("field: column_text is not a full lattice");
    out.psi.assign(nx * nz, 0.0);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t q = 0; q < nz; ++q) out.psi[q * nx + i] = rows[i * nz + q][2];
  } else {
    throw IoError("field: missing or unknown '# format' header");
  }
  return out;
}

void write_cross_section(std::ostream& os, const CrossSection& section, double time) {
  os << "# time\t" << format_number(time) << '\n'
     << "# x_requested\t" << format_number(section.x_requested) << '\n'
     << "# x_used\t" << format_number(section.x_used) << '\n'
     << "# rule\t" << kCrossSectionRule << '\n'
     << "# z\tpsi\n";
  for (std::size_t q = 0; q < section.z.size(); ++q) {
    os << format_number(section.z[q]) << '\t' << format_number(section.psi[q]) << '\n';
  }
}

double weighted_field_energy(const FieldSnapshot& snapshot, const Stratification& strat,
                             double dx) {
  const std::size_t nz = snapshot.z.size();
  if (nz < 3 || nz % 2 == 0) {
    throw ConfigError("weighted_field_energy: needs an odd number (>= 3) of z rows");
  }
  const double dz = (snapshot.z.back() - snapshot.z.front()) / static_cast<double>(nz - 1);
  const std::size_t nx = snapshot.x.size();
  double total = 0.0;
  for (std::size_t q = 0; q < nz; ++q) {
    const double w = (q == 0 || q == nz - 1) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) row += snapshot.at(q, i) * snapshot.at(q, i);
    total += w * row;
  }
  const double n2 = strat.buoyancy_frequency * strat.buoyancy_frequency;
  return n2 * total * dz / 3.0 * dx;
}

double modal_energy(const ModeState& state, const Grid& grid) {
  const double n = discrete_l2_norm(state, grid);
  return n * n;
}

}  // namespace ckdv
