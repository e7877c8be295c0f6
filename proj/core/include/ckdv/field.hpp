#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckdv/modal_basis.hpp"
#include "ckdv/solver.hpp"

namespace ckdv {

/// Stream function psi(z_q, x_i) = sum_n Z^n(z_q) theta^n(x_i) on a lattice.
struct FieldSnapshot {
  double time = 0.0;
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> psi;  // row-major in z: psi[q * x.size() + i]

  double at(std::size_t q, std::size_t i) const { return psi[q * x.size() + i]; }
  double max_abs() const;
  /// max over x of |psi| on the first and last z rows.
  double max_wall_abs() const;
};

/// Samples z uniformly on [0, h] with `z_points` points (first and last on
/// the walls, where psi is exactly zero).
FieldSnapshot synthesize(const ModeBasis& basis, const ModeState& state, const Grid& grid,
                         int z_points);

/// Rows with z_lo <= z <= z_hi, e.g. the upper half of the tank.
FieldSnapshot slice_rows(const FieldSnapshot& snapshot, double z_lo, double z_hi);

struct CrossSection {
  double x_requested = 0.0;
  double x_used = 0.0;
  std::size_t column = 0;
  std::vector<double> z;
  std::vector<double> psi;
};

inline constexpr const char* kCrossSectionRule =
    "nearest grid column; ties go to the larger x";

/// psi(., x_nearest). Throws ConfigError when x_fixed lies outside
/// [x.front(), x.back()].
CrossSection cross_section(const FieldSnapshot& snapshot, double x_fixed);

enum class FieldFormat { grid_text, column_text };

std::string to_string(FieldFormat f);
FieldFormat field_format_from_string(const std::string& name);

void export_field(std::ostream& os, const FieldSnapshot& snapshot, FieldFormat format);
/// Throws IoError naming the path.
void export_field(const std::filesystem::path& path, const FieldSnapshot& snapshot,
                  FieldFormat format);
FieldSnapshot import_field(std::istream& is);

void write_cross_section(std::ostream& os, const CrossSection& section, double time);

/// integral of N^2 psi^2 over the lattice: Simpson in z, periodic rectangle
/// rule in x. Requires an odd number of z rows spanning [0, h].
double weighted_field_energy(const FieldSnapshot& snapshot, const Stratification& strat,
                             double dx);

/// sum_n sum_i (theta^n_i)^2 dx
double modal_energy(const ModeState& state, const Grid& grid);

}  // namespace ckdv
