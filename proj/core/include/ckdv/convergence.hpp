#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/solver.hpp"

namespace ckdv {

/// A problem with a known solution on a periodic domain.
struct ExactProblem {
  CoefficientSet coeffs;
  double x_left = 0.0;
  double length = 0.0;
  std::function<ModeState(const Grid& grid, double t)> sample;
};

/// Integrates `initial` to t_end on `grid` with step `tau`.
using Propagator = std::function<ModeState(const ModeState& initial, const Grid& grid,
                                           double tau, double t_end)>;

/// The solver under test: advance() with the given scheme.
Propagator scheme_propagator(const CoefficientSet& coeffs, Scheme scheme,
                             FullStepDispersion full_step = FullStepDispersion::modified);

struct RefinementLevel {
  std::size_t n_points = 0;
  double tau = 0.0;
};

struct LevelResult {
  double dx = 0.0;
  double tau = 0.0;
  std::size_t steps = 0;
  double error = 0.0;           // discrete L2 norm of the discrepancy
  double relative_error = 0.0;  // error / norm of the reference
  bool completed = true;
  std::string failure;
};

struct OrderFit {
  double order = 0.0;
  /// max over adjacent level pairs of |local order - fitted order|.
  double residual = 0.0;
  /// False when fewer than two usable levels exist or residual > 0.1; the
  /// order is then not meaningful.
  bool asymptotic = false;
};

inline constexpr double kFitResidualLimit = 0.1;

/// Least-squares slope of log(error) against log(step).
OrderFit fit_order(std::span<const double> steps, std::span<const double> errors);

enum class Refinement { space, time };

struct ConvergenceReport {
  std::string scheme;
  Refinement refined = Refinement::space;
  /// True when each level is compared with the next finer level instead of
  /// with an exact solution.
  bool self_convergence = false;
  std::vector<LevelResult> levels;
  OrderFit fit;
};

/// Compares the propagated solution with the exact one at t_end on every
/// level and fits the order against dx (space) or tau (time). A level that
/// blows up is recorded and excluded from the fit.
ConvergenceReport measure_convergence(const ExactProblem& problem,
                                      const Propagator& propagate,
                                      std::span<const RefinementLevel> levels, double t_end,
                                      Refinement refined, const std::string& scheme_name);

/// Temporal order at a fixed grid from successive differences
/// ||theta_tau_k - theta_tau_{k+1}||, needed when the spatial error of the
/// exact-solution comparison swamps the time error. `taus` must decrease;
/// the report has taus.size() - 1 levels.
ConvergenceReport measure_self_convergence(const ExactProblem& problem,
                                           const Propagator& propagate,
                                           std::size_t n_points, std::span<const double> taus,
                                           double t_end, const std::string& scheme_name);

void write_convergence_report(std::ostream& os, const ConvergenceReport& report);

}  // namespace ckdv
