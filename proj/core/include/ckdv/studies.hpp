#pragma once

#include <cstddef>
#include <vector>

#include "ckdv/convergence.hpp"
#include "ckdv/diagnostics.hpp"
#include "ckdv/oracles.hpp"

namespace ckdv {

/// Single-mode soliton used by the convergence, conservation and stability
/// studies: c = 196, g = 6, d = 1, A = 2, so width = 1 and speed = 200, on a
/// periodic domain of 32 widths, run for 100 transit times (t = 0.5).
struct SolitonBenchmark {
  SolitonOracle oracle{196.0, 6.0, 1.0, 2.0};
  double length = 32.0;
  double transits = 100.0;
  /// Two-stage spatial study: tau = margin * dx^4 on every level.
  std::vector<std::size_t> n_points = {256, 512, 1024};
  double margin = 0.25;
  /// One-stage temporal study at a fixed coarse grid.
  std::size_t temporal_n_points = 128;
  std::vector<double> temporal_taus = {4e-6, 2e-6, 1e-6, 5e-7};

  double t_end() const { return transits * oracle.transit_time(); }
  double x_left() const { return -0.5 * length; }
  ExactProblem problem() const;
  std::vector<RefinementLevel> levels() const;
};

/// Two-stage scheme against the exact soliton under dx refinement.
ConvergenceReport two_stage_spatial_study(const SolitonBenchmark& bench = {});

/// One-stage scheme under tau refinement at a fixed grid, by self-convergence.
ConvergenceReport one_stage_temporal_study(const SolitonBenchmark& bench = {});

struct ConservationStudy {
  std::size_t steps = 0;
  double max_abs_theta = 0.0;
  double mass_change = 0.0;  // two-stage nonlinear soliton run
  double mass_bound = 0.0;   // 1e-12 * steps * max|theta|
  /// One-stage energy drift at tau and tau/2 over the same time span, with
  /// the nonlinear term off so the semi-discrete energy is exactly conserved.
  double energy_drift_tau = 0.0;
  double energy_drift_half = 0.0;
  double energy_ratio = 0.0;
  /// Same with the nonlinear term on: the centred nonlinear difference has
  /// its own tau-independent drift, which the raw ratio includes.
  double nonlinear_ratio = 0.0;
  bool mass_ok() const { return mass_change <= mass_bound; }
  bool energy_ok() const { return energy_ratio >= 1.7 && energy_ratio <= 2.3; }
};

/// Canonical soliton (c = 0, g = 6, d = 1, A = 2) on 32 widths with dx = 1/8;
/// `steps` steps of tau = 4e-6 (and 2 * steps of tau / 2).
ConservationStudy conservation_study(std::size_t steps = 100000);

/// Stability sweep of the benchmark soliton at dx = 1/8 for 10^4 steps.
StabilityProbe soliton_stability_probe(Scheme scheme, std::span<const double> b_values,
                                       std::size_t steps = 10000);

/// Advection-only run (g = d = 0, c = 1) of a sech^2 pulse on n_points
/// cells of a 32-unit domain; b is the Courant number tau c / dx.
StabilityProbe advection_stability_probe(std::size_t n_points,
                                         std::span<const double> courant_numbers,
                                         std::size_t steps = 10000);

}  // namespace ckdv
