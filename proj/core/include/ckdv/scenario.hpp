#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/modal_basis.hpp"
#include "ckdv/solver.hpp"

namespace ckdv {

/// Released paddle pulse psi(z, x, 0) = phi1(x) phi2(z) with
///   phi1(x) = a / cosh(x / l),
///   phi2(z) = sqrt(2 / (N^2 h)) sech(b (z - z0)) tanh(b (z - z0)).
struct PaddleProfile {
  double a = 0.0;   // horizontal amplitude
  double l = 0.0;   // horizontal width, m
  double b = 0.0;   // vertical steepness, 1/m
  double z0 = 0.0;  // paddle centre height, m

  double phi1(double x) const;
  double phi2(double z, const Stratification& strat) const;
  Profile vertical(const Stratification& strat) const;

  friend bool operator==(const PaddleProfile&, const PaddleProfile&) = default;
};

struct GridConfig {
  double tank_length = 0.5;  // m
  double padding = 2.0;      // periodic domain = padding * tank_length
  double dx = 0.0;           // requested spacing; the grid rounds to cover the domain

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct SchemeConfig {
  Scheme scheme = Scheme::two_stage;
  double dt = 0.0;  // 0 selects margin * dx^4 (two-stage) or margin * dx^6
  double margin = 1.0;
  FullStepDispersion full_step_dispersion = FullStepDispersion::modified;
  double sigma = 1.0;
  double beta2 = 1.0;

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

struct RunConfig {
  double t_end = 0.0;
  std::size_t snapshot_every = 0;  // 0: initial and final snapshots only
  int z_points = 129;
  std::string run_id = "run";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ScenarioConfig {
  Stratification strat;
  std::vector<int> modes;
  PaddleProfile paddle;
  GridConfig grid;
  SchemeConfig scheme;
  RunConfig run;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Tank of depth 0.25 m and length 0.5 m, N = 1.23 1/s, modes (2,4,6,8,10),
/// t_end = 0.02 s. The pulse constants a, l, b and the step margin are
/// illustrative choices, not measured values.
ScenarioConfig mcewan_default();

/// Letters, digits, '-', '_' and '.'; not empty, "." or "..".
bool filesystem_safe(const std::string& id);

struct Violation {
  std::string field;  // e.g. "paddle.l"
  std::string rule;
};

std::vector<Violation> validate(const ScenarioConfig& cfg);

/// Throws ConfigError listing every violation.
void require_valid(const ScenarioConfig& cfg);

/// Periodic grid covering [-L/2, L/2), L = padding * tank_length.
Grid make_grid(const ScenarioConfig& cfg);
ModeBasis make_basis(const ScenarioConfig& cfg);
CoefficientSet make_coefficients(const ScenarioConfig& cfg, const ModeBasis& basis);
SchemeParams make_scheme_params(const ScenarioConfig& cfg, const Grid& grid,
                                const CoefficientSet& coeffs);

struct InitialState {
  ModeState state;
  Projection projection;
  /// (Z^n, phi2)^2 / ||phi2||^2 per mode.
  std::vector<double> energy_fraction;
  /// max over the z sample grid of |phi2 - sum_n (Z^n, phi2) Z^n|.
  double max_profile_residual = 0.0;
  /// Bound on |psi - psi_truncated| at t = 0: |a| * max_profile_residual.
  double max_field_residual = 0.0;
};

/// theta^n(x_i, 0) = (Z^n, phi2) phi1(x_i).
InitialState build_initial_state(const ScenarioConfig& cfg, const ModeBasis& basis,
                                 const Grid& grid);

/// INI text with sections [stratification], [paddle], [grid], [scheme], [run].
/// Keys absent from the text keep their mcewan_default() values; unknown
/// sections or keys are rejected.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ScenarioConfig& cfg);
std::string config_to_string(const ScenarioConfig& cfg);

std::vector<int> parse_mode_list(const std::string& text);
std::string format_mode_list(const std::vector<int>& modes);

}  // namespace ckdv
