#include "ckdv/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"

namespace ckdv {

Propagator scheme_propagator(const CoefficientSet& coeffs, Scheme scheme,
                             FullStepDispersion full_step) {
  return [coeffs, scheme, full_step](const ModeState& initial, const Grid& grid, double tau,
                                     double t_end) {
    SchemeParams params;
    params.tau = tau;
    params.scheme = scheme;
    params.full_step_dispersion = full_step;
    return advance(initial, coeffs, grid, params, t_end).state;
  };
}

OrderFit fit_order(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size()) throw ConfigError("fit_order: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i])) {
      lx.push_back(std::log(steps[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  OrderFit fit;
  if (lx.size() < 2) {
    fit.order = std::numeric_limits<double>::quiet_NaN();
    fit.residual = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.order = sxy / sxx;
  for (std::size_t i = 0; i + 1 < lx.size(); ++i) {
    const double local = (ly[i] - ly[i + 1]) / (lx[i] - lx[i + 1]);
    fit.residual = std::max(fit.residual, std::abs(local - fit.order));
  }
  fit.asymptotic = fit.residual <= kFitResidualLimit;
  return fit;
}

ConvergenceReport measure_convergence(const ExactProblem& problem,
                                      const Propagator& propagate,
                                      std::span<const RefinementLevel> levels, double t_end,
                                      Refinement refined, const std::string& scheme_name) {
  ConvergenceReport report;
  report.scheme = scheme_name;
  report.refined = refined;
  std::vector<double> steps, errors;
  for (const RefinementLevel& level : levels) {
    const Grid grid = Grid::covering(problem.x_left, problem.length, level.n_points);
    LevelResult r;
    r.dx = grid.dx;
    r.tau = level.tau;
    const ModeState initial = problem.sample(grid, 0.0);
    const ModeState exact = problem.sample(grid, t_end);
    try {
      const ModeState numeric = propagate(initial, grid, level.tau, t_end);
      r.error = discrete_l2_norm(numeric, exact, grid);
      r.relative_error = r.error / discrete_l2_norm(exact, grid);
      r.steps = t_end > 0.0
                    ? static_cast<std::size_t>(std::ceil(t_end / level.tau * (1.0 - 1e-12)))
                    : 0;
      steps.push_back(refined == Refinement::space ? r.dx : r.tau);
      errors.push_back(r.error);
    } catch (const NonFiniteError& e) {
      r.completed = false;
      r.failure = e.what();
    }
    report.levels.push_back(std::move(r));
  }
  report.fit = fit_order(steps, errors);
  return report;
}

ConvergenceReport measure_self_convergence(const ExactProblem& problem,
                                           const Propagator& propagate,
                                           std::size_t n_points, std::span<const double> taus,
                                           double t_end, const std::string& scheme_name) {
  if (taus.size() < 2) throw ConfigError("self convergence: needs at least two steps");
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (!(taus[i] < taus[i - 1])) throw ConfigError("self convergence: taus must decrease");
  }
  ConvergenceReport report;
  report.scheme = scheme_name;
  report.refined = Refinement::time;
  report.self_convergence = true;
  const Grid grid = Grid::covering(problem.x_left, problem.length, n_points);
  const ModeState initial = problem.sample(grid, 0.0);

  std::vector<std::optional<ModeState>> runs;
  std::vector<std::string> failures;
  for (double tau : taus) {
    try {
      runs.emplace_back(propagate(initial, grid, tau, t_end));
      failures.emplace_back();
    } catch (const NonFiniteError& e) {
      runs.emplace_back();
      failures.emplace_back(e.what());
    }
  }
  std::vector<double> steps, errors;
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    LevelResult r;
    r.dx = grid.dx;
    r.tau = taus[i];
    r.steps = static_cast<std::size_t>(std::ceil(t_end / taus[i] * (1.0 - 1e-12)));
    if (runs[i] && runs[i + 1]) {
      r.error = discrete_l2_norm(*runs[i], *runs[i + 1], grid);
      r.relative_error = r.error / discrete_l2_norm(*runs[i + 1], grid);
      steps.push_back(r.tau);
      errors.push_back(r.error);
    } else {
      r.completed = false;
      r.failure = !failures[i].empty() ? failures[i] : failures[i + 1];
    }
    report.levels.push_back(std::move(r));
  }
  report.fit = fit_order(steps, errors);
  return report;
}

void write_convergence_report(std::ostream& os, const ConvergenceReport& report) {
  os << "# scheme\t" << report.scheme << '\n'
     << "# refined\t" << (report.refined == Refinement::space ? "space" : "time") << '\n'
     << "# reference\t" << (report.self_convergence ? "next finer level" : "exact solution")
     << '\n'
     << "# dx\ttau\tsteps\terror\trelative_error\tstatus\n";
  for (const auto& l : report.levels) {
    os << format_number(l.dx) << '\t' << format_number(l.tau) << '\t' << l.steps << '\t'
       << format_number(l.error) << '\t' << format_number(l.relative_error) << '\t'
       << (l.completed ? "ok" : "unstable: " + l.failure) << '\n';
  }
  os << "# fitted order\t" << format_number(report.fit.order) << '\n'
     << "# fit residual\t" << format_number(report.fit.residual) << '\n'
     << "# asymptotic\t"
     << (report.fit.asymptotic ? "yes" : "no (refinement range not asymptotic)") << '\n';
}

}  // namespace ckdv
