#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ckdv/coeff_engine.hpp"

namespace ckdv {

/// Uniform periodic grid x_i = x0 + i dx, i = 0 .. n_points-1.
struct Grid {
  double dx = 0.0;
  std::size_t n_points = 0;
  double x0 = 0.0;
  bool periodic = true;

  double length() const { return dx * static_cast<double>(n_points); }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  void validate() const;

  /// Periodic grid of `n_points` cells covering [x_left, x_left + length).
  static Grid covering(double x_left, double length, std::size_t n_points);
};

/// Horizontal amplitudes theta^n(x_i) of every mode at one time level.
/// Storage is mode-major: mode(s)[i].
class ModeState {
 public:
  ModeState() = default;
  ModeState(std::vector<int> mode_indices, std::size_t n_points, double time = 0.0);

  double time = 0.0;

  std::size_t mode_count() const { return mode_indices_.size(); }
  std::size_t n_points() const { return n_points_; }
  const std::vector<int>& mode_indices() const { return mode_indices_; }

  std::span<double> mode(std::size_t slot) {
    return {data_.data() + slot * n_points_, n_points_};
  }
  std::span<const double> mode(std::size_t slot) const {
    return {data_.data() + slot * n_points_, n_points_};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const ModeState& other) const {
    return mode_indices_ == other.mode_indices_ && n_points_ == other.n_points_;
  }
  bool all_finite() const;
  double max_abs() const;

 private:
  std::vector<int> mode_indices_;
  std::size_t n_points_ = 0;
  std::vector<double> data_;
};

enum class Scheme { two_stage, one_stage };

/// Dispersion coefficient e_n used by the full step of the two-stage scheme.
enum class FullStepDispersion {
  modified,    // beta2 d_n - c_n dx^2 / 6, same as the half step
  unmodified,  // beta2 d_n
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);
std::string to_string(FullStepDispersion d);
FullStepDispersion full_step_dispersion_from_string(const std::string& name);

struct SchemeParams {
  double tau = 0.0;
  Scheme scheme = Scheme::two_stage;
  /// b in tau <= b dx^4 (two-stage) or tau <= b dx^6 (one-stage).
  double margin = 1.0;
  FullStepDispersion full_step_dispersion = FullStepDispersion::modified;
};

/// Raised when a step produces a non-finite value. Carries the step index at
/// which it happened and the last finite state.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(std::size_t step, ModeState last_finite);
  std::size_t step() const { return step_; }
  const ModeState& last_finite_state() const { return last_finite_; }

 private:
  std::size_t step_;
  ModeState last_finite_;
};

/// Level j+1/2 of the two-stage scheme: forward half step with centered
/// advection and nonlinearity and dispersion coefficient beta2 d_n - c_n dx^2/6
/// (or beta2 d_n when `dispersion_correction` is false).
ModeState half_step(const ModeState& state, const CoefficientSet& coeffs,
                    const Grid& grid, double tau, bool dispersion_correction = true);

/// Level j+1 from level j and the intermediate level j+1/2.
ModeState full_step(const ModeState& state_j, const ModeState& state_half,
                    const CoefficientSet& coeffs, const Grid& grid, double tau,
                    FullStepDispersion dispersion = FullStepDispersion::modified);

/// Forward-Euler step with unmodified dispersion coefficient beta2 d_n.
ModeState one_stage_step(const ModeState& state, const CoefficientSet& coeffs,
                         const Grid& grid, double tau);

/// (sum_n sum_i (a - b)^2 dx)^(1/2)
double discrete_l2_norm(const ModeState& a, const ModeState& b, const Grid& grid);
/// (sum_n sum_i a^2 dx)^(1/2)
double discrete_l2_norm(const ModeState& a, const Grid& grid);

/// b dx^4 for the two-stage scheme, b dx^6 for the one-stage scheme.
double suggest_timestep(const Grid& grid, const CoefficientSet& coeffs,
                        const SchemeParams& params);

/// Largest |symbol| of the linear part of the discrete operator over the
/// resolvable wavenumbers, i.e. the spectral radius of the step matrix / tau.
double linear_spectral_radius(const Grid& grid, const CoefficientSet& coeffs,
                              Scheme scheme);

/// Step bounding the amplification of the stiffest linear mode over `span`
/// by exp(growth_budget) in energy. For the two-stage scheme the per-step
/// gain is 1 + y^4/4 and for the one-stage scheme 1 + y^2, y = tau * radius.
double growth_limited_timestep(const Grid& grid, const CoefficientSet& coeffs,
                               Scheme scheme, double span, double growth_budget = 5.0);

struct ConservedSample {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<double> mass;    // sum_i theta_i, per mode
  std::vector<double> energy;  // sum_i theta_i^2, per mode
};

ConservedSample measure_conserved(const ModeState& state, std::size_t step);

struct RunReport {
  Scheme scheme = Scheme::two_stage;
  double tau = 0.0;  // step actually used (lands exactly on t_end)
  std::size_t steps = 0;
  std::vector<ConservedSample> series;
  std::vector<std::string> warnings;
};

using Observer = std::function<void(const ModeState& state, std::size_t step)>;

struct AdvanceOptions {
  /// Observer and conserved-quantity sampling interval in steps; 0 samples
  /// only the initial and final levels.
  std::size_t snapshot_every = 0;
  Observer observer;
};

struct AdvanceResult {
  ModeState state;
  RunReport report;
};

/// Integrates from state.time to t_end with uniform steps
/// tau' = (t_end - t0) / ceil((t_end - t0) / tau) <= tau.
/// Throws NonFiniteError on blow-up.
AdvanceResult advance(ModeState state, const CoefficientSet& coeffs, const Grid& grid,
                      const SchemeParams& params, double t_end,
                      const AdvanceOptions& options = {});

}  // namespace ckdv
