#include "ckdv/fission.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"

namespace ckdv {

ScatteringSpectrum scattering_spectrum(const std::function<double(double)>& potential,
                                       double half_width, std::size_t points) {
  if (points < 16 || !(half_width > 0.0)) {
    throw ConfigError("scattering_spectrum: need >= 16 points and a positive domain");
  }
  const double step = 2.0 * half_width / static_cast<double>(points + 1);
  const double inv = 1.0 / (step * step);
  const auto n = static_cast<Eigen::Index>(points);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -inv);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = -half_width + step * static_cast<double>(i + 1);
    diag(i) = 2.0 * inv - potential(x);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConsistencyError("scattering_spectrum: eigenvalue iteration failed");
  }
  ScatteringSpectrum out;
  out.half_width = half_width;
  out.points = points;
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  for (Eigen::Index i = 0; i < ev.size() && ev(i) < 0.0; ++i) {
    const double kappa = std::sqrt(-ev(i));
    out.kappas.push_back(kappa);
    out.amplitudes.push_back(2.0 * kappa * kappa);
  }
  return out;
}

CanonicalScaling canonical_scaling(double nonlinear, double dispersion, double width) {
  if (nonlinear == 0.0 || !(dispersion > 0.0) || !(width > 0.0)) {
    throw ConfigError("canonical scaling: needs g != 0, d > 0, w > 0");
  }
  return {width, 6.0 * dispersion / (nonlinear * width * width),
          width * width * width / dispersion};
}

std::vector<Crest> find_crests(const ModeState& state, const Grid& grid,
                               double floor_fraction, std::size_t slot) {
  const auto u = state.mode(slot);
  const std::size_t n = u.size();
  double peak = 0.0;
  for (double v : u) peak = std::max(peak, v);
  std::vector<Crest> out;
  if (peak <= 0.0) return out;
  const double floor = floor_fraction * peak;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = u[(i + n - 1) % n];
    const double mid = u[i];
    const double right = u[(i + 1) % n];
    if (!(mid > left && mid >= right && mid > floor)) continue;
    const double curv = left - 2.0 * mid + right;
    const double p = curv != 0.0 ? 0.5 * (left - right) / curv : 0.0;
    out.push_back({grid.x(i) + p * grid.dx, mid - 0.25 * (left - right) * p, 0.0});
  }
  return out;
}

namespace {

double wrap(double dx, double length) {
  double r = std::fmod(dx, length);
  if (r < -0.5 * length) r += length;
  if (r >= 0.5 * length) r -= length;
  return r;
}

}  // namespace

std::vector<Crest> persistent_crests(std::span<const ModeState> snapshots, const Grid& grid,
                                     double phase_speed, double nonlinear,
                                     const CrestCriteria& criteria) {
  if (snapshots.size() < 2) throw ConfigError("persistent_crests: needs >= 2 snapshots");
  std::vector<std::vector<Crest>> found;
  for (const auto& s : snapshots) found.push_back(find_crests(s, grid, criteria.floor_fraction));

  const double length = grid.length();
  std::vector<Crest> out;
  for (const Crest& last : found.back()) {
    const double excess = nonlinear * last.amplitude / 3.0;
    Crest current = last;
    double travelled = 0.0;
    bool followed = true;
    for (std::size_t k = snapshots.size() - 1; k-- > 0;) {
      const double dt = snapshots[k + 1].time - snapshots[k].time;
      const double expected = current.x - (phase_speed + excess) * dt;
      const double window = criteria.speed_tolerance * std::abs(excess) * dt + 2.0 * grid.dx;
      const Crest* match = nullptr;
      double best = window;
      for (const Crest& c : found[k]) {
        const double miss = std::abs(wrap(c.x - expected, length));
        if (miss <= best) {
          best = miss;
          match = &c;
        }
      }
      if (!match ||
          std::abs(match->amplitude - current.amplitude) >
              criteria.amplitude_tolerance * std::abs(current.amplitude)) {
        followed = false;
        break;
      }
      travelled += wrap(current.x - match->x, length);
      current = *match;
    }
    if (!followed) continue;
    const double span = snapshots.back().time - snapshots.front().time;
    Crest c = last;
    c.speed = travelled / span;
    if (std::abs((c.speed - phase_speed) - excess) <=
        criteria.speed_tolerance * std::abs(excess)) {
      out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Crest& a, const Crest& b) { return a.amplitude > b.amplitude; });
  return out;
}

FissionSetup canonical_fission_setup(double u0) {
  FissionSetup s;
  s.phase_speed = 0.0;
  s.nonlinear = 6.0;
  s.dispersion = 1.0;
  s.width = 1.0;
  s.amplitude = u0;
  return s;
}

FissionReport fission_census(const FissionSetup& setup) {
  if (!(setup.nonlinear > 0.0) || !(setup.amplitude > 0.0)) {
    throw ConfigError("fission census: expects g > 0 and a positive pulse");
  }
  if (!(setup.dx > 0.0) || !(setup.t_end > 0.0)) {
    throw ConfigError("fission census: dx and t_end must be > 0");
  }
  const CanonicalScaling scale =
      canonical_scaling(setup.nonlinear, setup.dispersion, setup.width);
  FissionReport report;
  report.amplitude = setup.amplitude;
  report.width = setup.width;
  report.canonical_amplitude = setup.amplitude / scale.gamma;

  const double u0 = report.canonical_amplitude;
  const PulseShape shape = setup.shape;
  auto profile = [shape](double s) {
    const double c = std::cosh(s);
    return shape == PulseShape::sech2 ? 1.0 / (c * c) : 1.0 / c;
  };
  // Weakly bound states spread over ~1/kappa ~ 1/U0 widths.
  const double half_width = 20.0 * std::max(1.0, 1.0 / std::sqrt(u0));
  report.spectrum = scattering_spectrum([&](double x) { return u0 * profile(x); },
                                        half_width, setup.eigen_points);
  report.predicted_count = report.spectrum.count();
  double fastest = setup.phase_speed;
  for (std::size_t k = 0; k < report.spectrum.count(); ++k) {
    const double a = report.spectrum.amplitudes[k];
    // Canonical lead 2 kappa^2 T versus width 1 / kappa, T = t_end / time_scale.
    const double lead = 2.0 * a * setup.t_end / scale.time_scale;
    if (lead * report.spectrum.kappas[k] >= 2.0) ++report.resolvable_count;
    report.predicted_amplitudes.push_back(scale.gamma * a);
    fastest = std::max(fastest, setup.phase_speed + setup.nonlinear * scale.gamma * a / 3.0);
  }

  const double w = setup.width;
  const double left = -20.0 * w + std::min(0.0, setup.phase_speed * setup.t_end);
  const double right = 20.0 * w + std::max(0.0, fastest * setup.t_end);
  const auto n = static_cast<std::size_t>(std::ceil((right - left) / setup.dx));
  report.grid = Grid::covering(left, static_cast<double>(n) * setup.dx, n);

  const CoefficientSet coeffs =
      single_mode_coefficients(setup.phase_speed, setup.nonlinear, setup.dispersion);
  SchemeParams params;
  params.scheme = Scheme::two_stage;
  params.tau = setup.tau > 0.0 ? setup.tau
                               : growth_limited_timestep(report.grid, coeffs, Scheme::two_stage,
                                                         setup.t_end, setup.growth_budget);

  ModeState state({1}, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    state.mode(0)[i] = setup.amplitude * profile(report.grid.x(i) / w);
  }
  std::vector<ModeState> snapshots;
  for (double fraction : {0.8, 0.9, 1.0}) {
    auto result = advance(std::move(state), coeffs, report.grid, params,
                          fraction * setup.t_end);
    report.tau = result.report.tau;
    report.steps += result.report.steps;
    state = std::move(result.state);
    snapshots.push_back(state);
  }
  report.crests = persistent_crests(snapshots, report.grid, setup.phase_speed,
                                    setup.nonlinear, setup.criteria);
  report.detected_count = report.crests.size();
  return report;
}

void write_fission_report(std::ostream& os, const FissionReport& report) {
  os << "# pulse amplitude\t" << format_number(report.amplitude) << '\n'
     << "# pulse width\t" << format_number(report.width) << '\n'
     << "# canonical amplitude\t" << format_number(report.canonical_amplitude) << '\n'
     << "# predicted solitons\t" << report.predicted_count << '\n'
     << "# resolvable by t_end\t" << report.resolvable_count << '\n';
  for (std::size_t k = 0; k < report.predicted_amplitudes.size(); ++k) {
    os << "#   kappa " << format_number(report.spectrum.kappas[k]) << "\tamplitude "
       << format_number(report.predicted_amplitudes[k]) << '\n';
  }
  os << "# detected solitons\t" << report.detected_count << '\n'
     << "# x\tamplitude\tspeed\n";
  for (const auto& c : report.crests) {
    os << format_number(c.x) << '\t' << format_number(c.amplitude) << '\t'
       << format_number(c.speed) << '\n';
  }
}

}  // namespace ckdv
