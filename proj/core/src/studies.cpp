#include "ckdv/studies.hpp"

#include <algorithm>
#include <cmath>

namespace ckdv {

ExactProblem SolitonBenchmark::problem() const {
  ExactProblem p;
  p.coeffs = oracle.coefficients();
  p.x_left = x_left();
  p.length = length;
  p.sample = [o = oracle](const Grid& grid, double t) { return o.sample(grid, t); };
  return p;
}

std::vector<RefinementLevel> SolitonBenchmark::levels() const {
  std::vector<RefinementLevel> out;
  for (std::size_t n : n_points) {
    const double dx = length / static_cast<double>(n);
    out.push_back({n, margin * dx * dx * dx * dx});
  }
  return out;
}

ConvergenceReport two_stage_spatial_study(const SolitonBenchmark& bench) {
  const ExactProblem p = bench.problem();
  const auto levels = bench.levels();
  return measure_convergence(p, scheme_propagator(p.coeffs, Scheme::two_stage), levels,
                             bench.t_end(), Refinement::space, "two-stage");
}

ConvergenceReport one_stage_temporal_study(const SolitonBenchmark& bench) {
  const ExactProblem p = bench.problem();
  return measure_self_convergence(p, scheme_propagator(p.coeffs, Scheme::one_stage),
                                  bench.temporal_n_points, bench.temporal_taus,
                                  bench.t_end(), "one-stage");
}

namespace {

double final_energy_drift(const ModeState& initial, const CoefficientSet& coeffs,
                          const Grid& grid, Scheme scheme, double tau, std::size_t steps) {
  SchemeParams params;
  params.tau = tau;
  params.scheme = scheme;
  const auto result =
      advance(initial, coeffs, grid, params, tau * static_cast<double>(steps));
  return conservation_audit(result.report.series).final_energy_drift;
}

}  // namespace

ConservationStudy conservation_study(std::size_t steps) {
  const SolitonOracle soliton(0.0, 6.0, 1.0, 2.0);
  const Grid grid = Grid::covering(-16.0, 32.0, 256);
  const ModeState initial = soliton.sample(grid, 0.0);
  const double tau = 4e-6;

  ConservationStudy out;
  out.steps = steps;
  out.max_abs_theta = initial.max_abs();
  out.mass_bound = 1e-12 * static_cast<double>(steps) * out.max_abs_theta;
  {
    SchemeParams params;
    params.tau = tau;
    AdvanceOptions options;
    options.snapshot_every = std::max<std::size_t>(1, steps / 100);
    const auto result = advance(initial, soliton.coefficients(), grid, params,
                                tau * static_cast<double>(steps), options);
    out.mass_change = conservation_audit(result.report.series).max_abs_mass_change;
  }
  const CoefficientSet linear = single_mode_coefficients(0.0, 0.0, 1.0);
  out.energy_drift_tau = final_energy_drift(initial, linear, grid, Scheme::one_stage, tau, steps);
  out.energy_drift_half =
      final_energy_drift(initial, linear, grid, Scheme::one_stage, 0.5 * tau, 2 * steps);
  out.energy_ratio = out.energy_drift_tau / out.energy_drift_half;

  const CoefficientSet full = soliton.coefficients();
  out.nonlinear_ratio =
      final_energy_drift(initial, full, grid, Scheme::one_stage, tau, steps) /
      final_energy_drift(initial, full, grid, Scheme::one_stage, 0.5 * tau, 2 * steps);
  return out;
}

StabilityProbe soliton_stability_probe(Scheme scheme, std::span<const double> b_values,
                                       std::size_t steps) {
  const SolitonBenchmark bench;
  const Grid grid = Grid::covering(bench.x_left(), bench.length, 256);
  return stability_probe(bench.oracle.sample(grid, 0.0), bench.oracle.coefficients(), grid,
                         scheme, scheme == Scheme::two_stage ? StepLaw::quartic : StepLaw::sextic,
                         b_values, steps);
}

StabilityProbe advection_stability_probe(std::size_t n_points,
                                         std::span<const double> courant_numbers,
                                         std::size_t steps) {
  const Grid grid = Grid::covering(-16.0, 32.0, n_points);
  ModeState initial({1}, n_points, 0.0);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double c = std::cosh(grid.x(i));
    initial.mode(0)[i] = 1.0 / (c * c);
  }
  return stability_probe(initial, single_mode_coefficients(1.0, 0.0, 0.0), grid,
                         Scheme::two_stage, StepLaw::courant, courant_numbers, steps);
}

}  // namespace ckdv
