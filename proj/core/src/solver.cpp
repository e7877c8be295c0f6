#include "ckdv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ckdv/error.hpp"

namespace ckdv {

void Grid::validate() const {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid: dx must be > 0");
  if (n_points < 8) throw ConfigError("grid: need at least 8 points");
  if (!periodic) throw ConfigError("grid: only periodic grids are supported");
}

Grid Grid::covering(double x_left, double length, std::size_t n_points) {
  Grid g{length / static_cast<double>(n_points), n_points, x_left, true};
  g.validate();
  return g;
}

ModeState::ModeState(std::vector<int> mode_indices, std::size_t n_points, double t)
    : time(t),
      mode_indices_(std::move(mode_indices)),
      n_points_(n_points),
      data_(mode_indices_.size() * n_points, 0.0) {}

bool ModeState::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double ModeState::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::string to_string(Scheme s) {
  return s == Scheme::two_stage ? "two-stage" : "one-stage";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "two-stage" || name == "two_stage") return Scheme::two_stage;
  if (name == "one-stage" || name == "one_stage") return Scheme::one_stage;
  throw ConfigError("unknown scheme '" + name + "' (expected two-stage or one-stage)");
}

std::string to_string(FullStepDispersion d) {
  return d == FullStepDispersion::modified ? "modified" : "unmodified";
}

FullStepDispersion full_step_dispersion_from_string(const std::string& name) {
  if (name == "modified") return FullStepDispersion::modified;
  if (name == "unmodified") return FullStepDispersion::unmodified;
  throw ConfigError("unknown full-step dispersion '" + name +
                    "' (expected modified or unmodified)");
}

namespace {

std::string describe_non_finite(std::size_t step) {
  std::ostringstream os;
  os << "non-finite amplitude after step " << step;
  return os.str();
}

}  // namespace

NonFiniteError::NonFiniteError(std::size_t step, ModeState last_finite)
    : std::runtime_error(describe_non_finite(step)),
      step_(step),
      last_finite_(std::move(last_finite)) {}

namespace {

std::vector<double> dispersion_coefficients(const CoefficientSet& coeffs, const Grid& grid,
                                            bool corrected) {
  std::vector<double> e(coeffs.size());
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    e[n] = coeffs.beta2 * coeffs.dispersion[n];
    if (corrected) e[n] -= coeffs.phase_speed[n] * grid.dx * grid.dx / 6.0;
  }
  return e;
}

// Evaluates out = base - dt * L(u), where
//   L(u)^n_i = c_n D0 u^n + sigma sum g^n_{mk} u^m D0 u^k + e_n D3 u^n
// with periodic wrap, D0 the centered first difference and D3 the five-point
// third difference.
class Stepper {
 public:
  Stepper(const CoefficientSet& coeffs, const Grid& grid)
      : modes_(coeffs.size()),
        points_(grid.n_points),
        stride_(grid.n_points + 4),
        dx_(grid.dx),
        phase_speed_(coeffs.phase_speed),
        padded_(modes_ * stride_),
        d0_(modes_ * points_) {
    coeffs.validate();
    grid.validate();
    for (std::size_t n = 0; n < modes_; ++n)
      for (std::size_t m = 0; m < modes_; ++m)
        for (std::size_t k = 0; k < modes_; ++k) {
          const double g = coeffs.sigma * coeffs.nonlinear(n, m, k);
          if (g != 0.0) terms_.push_back({n, m, k, g});
        }
  }

  void apply(const ModeState& u, const ModeState& base, std::span<const double> e,
             double dt, ModeState& out) {
    check_shape(u);
    check_shape(base);
    check_shape(out);
    const std::size_t np = points_;
    for (std::size_t s = 0; s < modes_; ++s) {
      const auto src = u.mode(s);
      double* p = padded_.data() + s * stride_;
      p[0] = src[np - 2];
      p[1] = src[np - 1];
      std::copy(src.begin(), src.end(), p + 2);
      p[np + 2] = src[0];
      p[np + 3] = src[1];
      double* d0 = d0_.data() + s * np;
      const double inv2h = 1.0 / (2.0 * dx_);
      for (std::size_t i = 0; i < np; ++i) {
        const double* q = p + i + 2;
        d0[i] = (q[1] - q[-1]) * inv2h;
      }
    }
    const double inv2h3 = 1.0 / (2.0 * dx_ * dx_ * dx_);
    for (std::size_t n = 0; n < modes_; ++n) {
      const double* p = padded_.data() + n * stride_;
      const double* d0 = d0_.data() + n * np;
      const auto b = base.mode(n);
      auto o = out.mode(n);
      const double c = phase_speed_[n];
      const double en = e[n] * inv2h3;
      for (std::size_t i = 0; i < np; ++i) {
        const double* q = p + i + 2;
        const double d3 = q[2] - 2.0 * q[1] + 2.0 * q[-1] - q[-2];
        rhs_scratch(i) = c * d0[i] + en * d3;
      }
      for (const Term& t : terms_) {
        if (t.n != n) continue;
        const auto um = u.mode(t.m);
        const double* dk = d0_.data() + t.k * np;
        for (std::size_t i = 0; i < np; ++i) rhs_scratch(i) += t.g * um[i] * dk[i];
      }
      for (std::size_t i = 0; i < np; ++i) o[i] = b[i] - dt * rhs_scratch(i);
    }
  }

 private:
  struct Term {
    std::size_t n, m, k;
    double g;
  };

  double& rhs_scratch(std::size_t i) {
    if (rhs_.size() != points_) rhs_.assign(points_, 0.0);
    return rhs_[i];
  }

  void check_shape(const ModeState& s) const {
    if (s.mode_count() != modes_ || s.n_points() != points_) {
      throw ConfigError("solver: state shape does not match coefficients/grid");
    }
  }

  std::size_t modes_;
  std::size_t points_;
  std::size_t stride_;
  double dx_;
  std::vector<double> phase_speed_;
  std::vector<Term> terms_;
  std::vector<double> padded_;
  std::vector<double> d0_;
  std::vector<double> rhs_;
};

void require_finite(const ModeState& next, const ModeState& previous, std::size_t step) {
  if (!next.all_finite()) throw NonFiniteError(step, previous);
}

}  // namespace

ModeState half_step(const ModeState& state, const CoefficientSet& coeffs, const Grid& grid,
                    double tau, bool dispersion_correction) {
  Stepper stepper(coeffs, grid);
  const auto e = dispersion_coefficients(coeffs, grid, dispersion_correction);
  ModeState out = state;
  stepper.apply(state, state, e, 0.5 * tau, out);
  out.time = state.time + 0.5 * tau;
  require_finite(out, state, 0);
  return out;
}

ModeState full_step(const ModeState& state_j, const ModeState& state_half,
                    const CoefficientSet& coeffs, const Grid& grid, double tau,
                    FullStepDispersion dispersion) {
  if (!state_j.same_shape(state_half)) {
    throw ConfigError("full_step: level j and j+1/2 states differ in shape");
  }
  Stepper stepper(coeffs, grid);
  const auto e =
      dispersion_coefficients(coeffs, grid, dispersion == FullStepDispersion::modified);
  ModeState out = state_j;
  stepper.apply(state_half, state_j, e, tau, out);
  out.time = state_j.time + tau;
  require_finite(out, state_j, 0);
  return out;
}

ModeState one_stage_step(const ModeState& state, const CoefficientSet& coeffs,
                         const Grid& grid, double tau) {
  Stepper stepper(coeffs, grid);
  const auto e = dispersion_coefficients(coeffs, grid, false);
  ModeState out = state;
  stepper.apply(state, state, e, tau, out);
  out.time = state.time + tau;
  require_finite(out, state, 0);
  return out;
}

double discrete_l2_norm(const ModeState& a, const ModeState& b, const Grid& grid) {
  if (!a.same_shape(b)) throw ConfigError("discrete_l2_norm: shape mismatch");
  if (a.n_points() != grid.n_points) {
    throw ConfigError("discrete_l2_norm: grid does not match states");
  }
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    sum += d * d;
  }
  return std::sqrt(sum * grid.dx);
}

double discrete_l2_norm(const ModeState& a, const Grid& grid) {
  if (a.n_points() != grid.n_points) {
    throw ConfigError("discrete_l2_norm: grid does not match state");
  }
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return std::sqrt(sum * grid.dx);
}

double suggest_timestep(const Grid& grid, const CoefficientSet& coeffs,
                        const SchemeParams& params) {
  grid.validate();
  coeffs.validate();
  const double h2 = grid.dx * grid.dx;
  const double h4 = h2 * h2;
  return params.scheme == Scheme::two_stage ? params.margin * h4
                                            : params.margin * h4 * h2;
}

double linear_spectral_radius(const Grid& grid, const CoefficientSet& coeffs,
                              Scheme scheme) {
  grid.validate();
  const auto e = dispersion_coefficients(coeffs, grid, scheme == Scheme::two_stage);
  constexpr int kSamples = 4096;
  double radius = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    for (int j = 0; j <= kSamples; ++j) {
      const double xi = std::numbers::pi * j / kSamples;
      const double advect = coeffs.phase_speed[n] * std::sin(xi) / grid.dx;
      const double disp = e[n] * (std::sin(2.0 * xi) - 2.0 * std::sin(xi)) /
                          (grid.dx * grid.dx * grid.dx);
      radius = std::max(radius, std::abs(advect + disp));
    }
  }
  return radius;
}

double growth_limited_timestep(const Grid& grid, const CoefficientSet& coeffs,
                               Scheme scheme, double span, double growth_budget) {
  if (!(span > 0.0) || !(growth_budget > 0.0)) {
    throw ConfigError("growth_limited_timestep: span and budget must be > 0");
  }
  const double rho = linear_spectral_radius(grid, coeffs, scheme);
  if (rho == 0.0) return span;
  double tau = scheme == Scheme::two_stage
                   ? std::cbrt(4.0 * growth_budget / (span * std::pow(rho, 4)))
                   : growth_budget / (span * rho * rho);
  return std::min({tau, 1.0 / rho, span});
}

ConservedSample measure_conserved(const ModeState& state, std::size_t step) {
  ConservedSample s;
  s.step = step;
  s.time = state.time;
  for (std::size_t m = 0; m < state.mode_count(); ++m) {
    double mass = 0.0;
    double energy = 0.0;
    for (double v : state.mode(m)) {
      mass += v;
      energy += v * v;
    }
    s.mass.push_back(mass);
    s.energy.push_back(energy);
  }
  return s;
}

AdvanceResult advance(ModeState state, const CoefficientSet& coeffs, const Grid& grid,
                      const SchemeParams& params, double t_end,
                      const AdvanceOptions& options) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) {
    throw ConfigError("advance: tau must be > 0");
  }
  const double t0 = state.time;
  if (!(t_end >= t0)) throw ConfigError("advance: t_end precedes the state time");
  if (state.mode_indices() != coeffs.mode_indices) {
    throw ConfigError("advance: state modes do not match the coefficient set");
  }

  AdvanceResult result;
  RunReport& report = result.report;
  report.scheme = params.scheme;

  const double span = t_end - t0;
  const std::size_t steps =
      span == 0.0 ? 0
                  : static_cast<std::size_t>(std::ceil(span / params.tau * (1.0 - 1e-12)));
  report.steps = steps;
  report.tau = steps == 0 ? params.tau : span / static_cast<double>(steps);

  const double bound = suggest_timestep(grid, coeffs, params);
  if (report.tau > bound) {
    std::ostringstream os;
    os << "tau = " << report.tau << " exceeds the margin b*dx^"
       << (params.scheme == Scheme::two_stage ? 4 : 6) << " = " << bound
       << " (b = " << params.margin << ")";
    report.warnings.push_back(os.str());
  }

  auto sample = [&](const ModeState& s, std::size_t step) {
    report.series.push_back(measure_conserved(s, step));
    if (options.observer) options.observer(s, step);
  };
  sample(state, 0);

  Stepper stepper(coeffs, grid);
  const auto e_half = dispersion_coefficients(coeffs, grid, true);
  const auto e_full = dispersion_coefficients(
      coeffs, grid, params.full_step_dispersion == FullStepDispersion::modified);
  const auto e_one = dispersion_coefficients(coeffs, grid, false);

  ModeState half = state;
  ModeState next = state;
  const double tau = report.tau;
  for (std::size_t step = 1; step <= steps; ++step) {
    if (params.scheme == Scheme::two_stage) {
      stepper.apply(state, state, e_half, 0.5 * tau, half);
      stepper.apply(half, state, e_full, tau, next);
    } else {
      stepper.apply(state, state, e_one, tau, next);
    }
    next.time = step == steps ? t_end : t0 + tau * static_cast<double>(step);
    require_finite(next, state, step);
    std::swap(state, next);
    const bool periodic_sample =
        options.snapshot_every > 0 && step % options.snapshot_every == 0;
    if (periodic_sample || step == steps) sample(state, step);
  }
  result.state = std::move(state);
  return result;
}

}  // namespace ckdv
