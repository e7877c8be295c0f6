#include "ckdv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>

#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"

namespace ckdv {

namespace {

double relative_change(double now, double start) {
  return start != 0.0 ? (now - start) / std::abs(start) : now - start;
}

}  // namespace

ConservationAudit conservation_audit(std::span<const ConservedSample> series) {
  ConservationAudit audit;
  if (series.empty()) return audit;
  const ConservedSample& first = series.front();
  const double mass0 = std::accumulate(first.mass.begin(), first.mass.end(), 0.0);
  const double energy0 = std::accumulate(first.energy.begin(), first.energy.end(), 0.0);
  for (const ConservedSample& s : series) {
    if (s.mass.size() != first.mass.size()) {
      throw ConfigError("conservation_audit: mode count changes along the series");
    }
    DriftSample d;
    d.step = s.step;
    d.time = s.time;
    for (std::size_t m = 0; m < s.mass.size(); ++m) {
      d.mass_change.push_back(s.mass[m] - first.mass[m]);
      d.energy_drift.push_back(relative_change(s.energy[m], first.energy[m]));
      audit.max_abs_mass_change =
          std::max(audit.max_abs_mass_change, std::abs(d.mass_change.back()));
    }
    d.total_mass_change = std::accumulate(s.mass.begin(), s.mass.end(), 0.0) - mass0;
    d.total_energy_drift =
        relative_change(std::accumulate(s.energy.begin(), s.energy.end(), 0.0), energy0);
    audit.max_abs_energy_drift =
        std::max(audit.max_abs_energy_drift, std::abs(d.total_energy_drift));
    audit.samples.push_back(std::move(d));
  }
  audit.final_energy_drift = audit.samples.back().total_energy_drift;
  return audit;
}

void write_conservation_audit(std::ostream& os, const ConservationAudit& audit) {
  os << "# step\ttime\ttotal_mass_change\ttotal_energy_drift\n";
  for (const auto& s : audit.samples) {
    os << s.step << '\t' << format_number(s.time) << '\t' << format_number(s.total_mass_change)
       << '\t' << format_number(s.total_energy_drift) << '\n';
  }
  os << "# max |mass change|\t" << format_number(audit.max_abs_mass_change) << '\n'
     << "# max |energy drift|\t" << format_number(audit.max_abs_energy_drift) << '\n';
}

namespace {

double step_for(StepLaw law, double b, const Grid& grid, const CoefficientSet& coeffs) {
  const double h = grid.dx;
  switch (law) {
    case StepLaw::quartic:
      return b * h * h * h * h;
    case StepLaw::sextic:
      return b * h * h * h * h * h * h;
    case StepLaw::courant: {
      double cmax = 0.0;
      for (double c : coeffs.phase_speed) cmax = std::max(cmax, std::abs(c));
      if (cmax == 0.0) throw ConfigError("stability probe: courant law needs some c_n != 0");
      return b * h / cmax;
    }
  }
  return 0.0;
}

const char* law_name(StepLaw law) {
  switch (law) {
    case StepLaw::quartic:
      return "b*dx^4";
    case StepLaw::sextic:
      return "b*dx^6";
    case StepLaw::courant:
      return "b*dx/max|c|";
  }
  return "";
}

double total_energy(const ModeState& s) {
  double e = 0.0;
  for (double v : s.values()) e += v * v;
  return e;
}

}  // namespace

StabilityProbe stability_probe(const ModeState& initial, const CoefficientSet& coeffs,
                               const Grid& grid, Scheme scheme, StepLaw law,
                               std::span<const double> b_values, std::size_t steps) {
  if (steps == 0) throw ConfigError("stability probe: steps must be > 0");
  StabilityProbe probe;
  probe.scheme = scheme;
  probe.law = law;
  probe.steps = steps;
  const double e0 = total_energy(initial);
  for (double b : b_values) {
    if (!(b > 0.0)) throw ConfigError("stability probe: b values must be > 0");
    ProbeVerdict v;
    v.b = b;
    v.tau = step_for(law, b, grid, coeffs);
    SchemeParams params;
    params.tau = v.tau;
    params.scheme = scheme;
    ModeState start = initial;
    start.time = 0.0;
    try {
      const auto result =
          advance(start, coeffs, grid, params, v.tau * static_cast<double>(steps));
      const double e1 = total_energy(result.state);
      v.energy_ratio = e0 > 0.0 ? e1 / e0 : (e1 == 0.0 ? 1.0 : e1);
      v.stable = v.energy_ratio <= kBlowUpEnergyRatio;
      if (!v.stable) v.reason = "energy grew by more than 10x";
    } catch (const NonFiniteError& e) {
      v.energy_ratio = std::numeric_limits<double>::infinity();
      v.stable = false;
      v.reason = e.what();
    }
    probe.verdicts.push_back(v);
  }
  auto sorted = probe.verdicts;
  std::sort(sorted.begin(), sorted.end(),
            [](const ProbeVerdict& a, const ProbeVerdict& b) { return a.b < b.b; });
  bool seen_unstable = false;
  for (const auto& v : sorted) {
    if (v.stable) {
      if (seen_unstable) probe.monotone = false;
      else probe.max_stable_b = v.b;
    } else {
      seen_unstable = true;
    }
  }
  return probe;
}

void write_stability_probe(std::ostream& os, const StabilityProbe& probe) {
  os << "# scheme\t" << to_string(probe.scheme) << '\n'
     << "# step law\t" << law_name(probe.law) << '\n'
     << "# steps\t" << probe.steps << '\n'
     << "# b\ttau\tenergy_ratio\tverdict\n";
  for (const auto& v : probe.verdicts) {
    os << format_number(v.b) << '\t' << format_number(v.tau) << '\t'
       << format_number(v.energy_ratio) << '\t' << (v.stable ? "stable" : "unstable")
       << (v.reason.empty() ? "" : " (" + v.reason + ")") << '\n';
  }
  os << "# largest stable b\t" << format_number(probe.max_stable_b) << '\n'
     << "# monotone\t" << (probe.monotone ? "yes" : "no") << '\n';
}

namespace {

CoefficientSet negated(CoefficientSet coeffs) {
  for (double& c : coeffs.phase_speed) c = -c;
  for (double& d : coeffs.dispersion) d = -d;
  const std::size_t e = coeffs.nonlinear.extent();
  for (std::size_t n = 0; n < e; ++n)
    for (std::size_t m = 0; m < e; ++m)
      for (std::size_t k = 0; k < e; ++k) coeffs.nonlinear(n, m, k) = -coeffs.nonlinear(n, m, k);
  return coeffs;
}

}  // namespace

PairCheckReport integrable_pair_check(const PairCheckOptions& options) {
  PairCheckReport report;
  if (options.n_points.size() < 3) throw ConfigError("pair check: needs >= 3 levels");
  const double x_left = -0.5 * options.length;

  std::optional<CoupledPairOracle> oracle;
  try {
    oracle.emplace(default_coupled_pair());
  } catch (const ConsistencyError& e) {
    report.notice = std::string("oracle construction failed, check skipped: ") + e.what();
    return report;
  }
  const CoefficientSet& coeffs = oracle->coefficients();
  report.constraint_residual = oracle->constraint_residual();
  report.substitution_residual =
      substitution_residual(
          coeffs,
          [&](std::size_t s, long double x, long double t) { return oracle->value(s, x, t); },
          -10.0, 20.0, 400, 0.0)
          .relative();
  if (report.substitution_residual > kOracleResidualTolerance) {
    report.notice = "oracle residual above tolerance, check skipped";
    return report;
  }
  report.oracle_ok = true;

  auto tau_for = [&](const Grid& grid, const CoefficientSet& c) {
    return growth_limited_timestep(grid, c, Scheme::two_stage, options.t_end,
                                   options.growth_budget);
  };

  // Decoupled limit: only the self-interaction entries survive.
  {
    CoefficientSet dec = coeffs;
    dec.nonlinear = Tensor3(2);
    dec.nonlinear(0, 0, 0) = coeffs.nonlinear(0, 0, 0);
    dec.nonlinear(1, 1, 1) = coeffs.nonlinear(1, 1, 1);
    const Grid grid = Grid::covering(x_left, options.length, options.n_points[1]);
    ModeState init(dec.mode_indices, grid.n_points, 0.0);
    std::vector<SolitonOracle> singles;
    for (std::size_t n = 0; n < 2; ++n) {
      const double g = dec.nonlinear(n, n, n);
      const double a = 12.0 * oracle->kappa() * oracle->kappa() * dec.dispersion[n] / g;
      singles.emplace_back(dec.phase_speed[n], g, dec.dispersion[n], a);
      const ModeState s = singles.back().sample(grid, 0.0);
      std::copy(s.mode(0).begin(), s.mode(0).end(), init.mode(n).begin());
    }
    SchemeParams params;
    params.tau = tau_for(grid, dec);
    const ModeState out = advance(init, dec, grid, params, options.t_end).state;
    for (std::size_t n = 0; n < 2; ++n) {
      const ModeState exact = singles[n].sample(grid, options.t_end);
      ModeState mine(exact.mode_indices(), grid.n_points, options.t_end);
      std::copy(out.mode(n).begin(), out.mode(n).end(), mine.mode(0).begin());
      report.decoupled_relative_error.push_back(discrete_l2_norm(mine, exact, grid) /
                                                discrete_l2_norm(exact, grid));
    }
  }

  ExactProblem problem;
  problem.coeffs = coeffs;
  problem.x_left = x_left;
  problem.length = options.length;
  problem.sample = [&](const Grid& g, double t) { return oracle->sample(g, t); };
  std::vector<RefinementLevel> levels;
  for (std::size_t n : options.n_points) {
    const Grid grid = Grid::covering(x_left, options.length, n);
    const double dx4 = grid.dx * grid.dx * grid.dx * grid.dx;
    levels.push_back({n, std::min(tau_for(grid, coeffs), options.margin * dx4)});
  }
  report.convergence =
      measure_convergence(problem, scheme_propagator(coeffs, Scheme::two_stage), levels,
                          options.t_end, Refinement::space, "two-stage");

  {
    const Grid grid = Grid::covering(x_left, options.length, options.n_points[1]);
    SchemeParams params;
    params.tau = tau_for(grid, coeffs);
    const ModeState init = oracle->sample(grid, 0.0);
    ModeState forward = advance(init, coeffs, grid, params, options.t_end).state;
    report.forward_error = discrete_l2_norm(forward, oracle->sample(grid, options.t_end), grid);
    forward.time = 0.0;
    const ModeState back =
        advance(forward, negated(coeffs), grid, params, options.t_end).state;
    report.reversal_error = discrete_l2_norm(back, init, grid);
  }
  return report;
}

void write_pair_check(std::ostream& os, const PairCheckReport& report) {
  if (!report.oracle_ok) {
    os << "# coupled pair check skipped: " << report.notice << '\n';
    return;
  }
  os << "# constraint residual\t" << format_number(report.constraint_residual) << '\n'
     << "# substitution residual\t" << format_number(report.substitution_residual) << '\n';
  for (std::size_t n = 0; n < report.decoupled_relative_error.size(); ++n) {
    os << "# decoupled mode " << n + 1 << " relative error\t"
       << format_number(report.decoupled_relative_error[n]) << '\n';
  }
  write_convergence_report(os, report.convergence);
  os << "# forward error\t" << format_number(report.forward_error) << '\n'
     << "# reversal error\t" << format_number(report.reversal_error) << '\n';
}

}  // namespace ckdv
