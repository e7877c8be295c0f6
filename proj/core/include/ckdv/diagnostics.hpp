#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ckdv/convergence.hpp"
#include "ckdv/oracles.hpp"
#include "ckdv/solver.hpp"

namespace ckdv {

struct DriftSample {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<double> mass_change;     // M(t) - M(0) per mode
  std::vector<double> energy_drift;    // (E(t) - E(0)) / E(0) per mode (absolute if E(0) = 0)
  double total_mass_change = 0.0;
  double total_energy_drift = 0.0;
};

struct ConservationAudit {
  std::vector<DriftSample> samples;
  double max_abs_mass_change = 0.0;   // over modes and samples
  double max_abs_energy_drift = 0.0;  // total energy, over samples
  double final_energy_drift = 0.0;    // total energy, last sample
};

/// Drift of sum_i theta_i and sum_i theta_i^2 relative to the first sample.
ConservationAudit conservation_audit(std::span<const ConservedSample> series);

void write_conservation_audit(std::ostream& os, const ConservationAudit& audit);

/// How the probe turns a margin b into a step.
enum class StepLaw {
  quartic,  // tau = b dx^4
  sextic,   // tau = b dx^6
  courant,  // tau = b dx / max_n |c_n|
};

struct ProbeVerdict {
  double b = 0.0;
  double tau = 0.0;
  bool stable = false;
  double energy_ratio = 0.0;  // final / initial total energy (inf after blow-up)
  std::string reason;
};

struct StabilityProbe {
  Scheme scheme = Scheme::two_stage;
  StepLaw law = StepLaw::quartic;
  std::size_t steps = 0;
  std::vector<ProbeVerdict> verdicts;  // in the order of the b values given
  double max_stable_b = 0.0;           // 0 if none was stable
  /// Verdicts, sorted by b, are stable up to a threshold and unstable above.
  bool monotone = true;
};

inline constexpr double kBlowUpEnergyRatio = 10.0;

/// Runs `steps` steps for each b; unstable means NonFinite or a total
/// energy growth above kBlowUpEnergyRatio.
StabilityProbe stability_probe(const ModeState& initial, const CoefficientSet& coeffs,
                               const Grid& grid, Scheme scheme, StepLaw law,
                               std::span<const double> b_values, std::size_t steps = 10000);

void write_stability_probe(std::ostream& os, const StabilityProbe& probe);

struct PairCheckReport {
  bool oracle_ok = false;
  std::string notice;               // why the check was skipped, if it was
  double constraint_residual = 0.0;
  double substitution_residual = 0.0;
  /// Decoupled limit: each mode compared with its own single-mode soliton.
  std::vector<double> decoupled_relative_error;
  ConvergenceReport convergence;    // two-stage, space refinement, coupled pair
  double forward_error = 0.0;       // finest level of the reversal run
  double reversal_error = 0.0;      // after integrating back with c, g, d negated
};

struct PairCheckOptions {
  double length = 40.0;
  double t_end = 0.25;
  std::vector<std::size_t> n_points = {320, 640, 1280};
  double growth_budget = 5.0;
  /// Refinement levels use min(growth-limited step, margin * dx^4) so the
  /// time error stays below the spatial one on the coarse level.
  double margin = 0.25;
};

/// Builds the coupled travelling-wave oracle, verifies it, and measures the
/// two-stage scheme on it.
PairCheckReport integrable_pair_check(const PairCheckOptions& options = {});

void write_pair_check(std::ostream& os, const PairCheckReport& report);

}  // namespace ckdv
