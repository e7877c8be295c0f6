#pragma once

#include <array>
#include <functional>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/solver.hpp"

namespace ckdv {

/// Exact solitary wave of theta_t + c theta_x + g theta theta_x + d theta_xxx = 0:
///   theta = A sech^2((x - x0 - v t) / width),
///   v = c + g A / 3,  width = sqrt(12 d / (g A)).
class SolitonOracle {
 public:
  /// Throws ConfigError unless g != 0, d > 0 and A g > 0.
  SolitonOracle(double phase_speed, double nonlinear, double dispersion, double amplitude,
                double x0 = 0.0);

  double phase_speed() const { return c_; }
  double nonlinear() const { return g_; }
  double dispersion() const { return d_; }
  double amplitude() const { return a_; }
  double speed() const { return c_ + g_ * a_ / 3.0; }
  double width() const;
  /// width / speed: time for the pulse to move one width.
  double transit_time() const { return width() / speed(); }

  /// Value on the unbounded line.
  long double value(long double x, long double t) const;
  /// Value on a periodic domain of the given length: the travelling
  /// coordinate is wrapped into [-length/2, length/2). Accurate while the
  /// tails at +-length/2 are negligible.
  double periodic_value(double x, double t, double length) const;

  /// Samples the periodic solution at time t into a single-mode state.
  ModeState sample(const Grid& grid, double t, int mode_index = 1) const;
  CoefficientSet coefficients(int mode_index = 1) const;

 private:
  double c_, g_, d_, a_, x0_;
};

/// Two-mode travelling wave theta^n = A_n sech^2(kappa (x - x0 - v t)) of the
/// coupled system. It exists when
///   v = c_n + 4 kappa^2 d_n                      (both n), and
///   sum_{m,k} g^n_{m,k} A_m A_k = 12 kappa^2 d_n A_n (both n).
/// Given kappa, c_1, d and g, c_2 follows from the first condition and the
/// amplitudes from the second by Newton iteration.
class CoupledPairOracle {
 public:
  CoupledPairOracle(CoefficientSet coeffs, double kappa, std::array<double, 2> amplitudes,
                    double x0 = 0.0);

  const CoefficientSet& coefficients() const { return coeffs_; }
  double kappa() const { return kappa_; }
  double speed() const;
  const std::array<double, 2>& amplitudes() const { return amp_; }
  /// max over n of the residual of both algebraic conditions, relative to
  /// the size of their terms.
  double constraint_residual() const;

  long double value(std::size_t slot, long double x, long double t) const;
  ModeState sample(const Grid& grid, double t) const;

 private:
  CoefficientSet coeffs_;
  double kappa_;
  std::array<double, 2> amp_;
  double x0_;
};

/// Builds the pair for the given data (modes labelled 1 and 2, sigma =
/// beta2 = 1). Throws ConsistencyError if Newton iteration fails to converge
/// or lands on a solution with a vanishing amplitude.
CoupledPairOracle make_coupled_pair(double kappa, double c1, std::array<double, 2> d,
                                    const Tensor3& g, double x0 = 0.0);

/// Fixed example used by the verification harness: kappa = 1, c_1 = 96,
/// d = (1, 1/2), fully coupled g.
CoupledPairOracle default_coupled_pair();

/// Exact solution candidate theta^slot(x, t) evaluated in extended precision.
using ExactField = std::function<long double(std::size_t slot, long double x, long double t)>;

struct ResidualCheck {
  double max_residual = 0.0;  // max |theta_t + c theta_x + sigma g.. + beta2 d theta_xxx|
  double term_scale = 0.0;    // max magnitude of any individual term
  double relative() const { return term_scale > 0.0 ? max_residual / term_scale : max_residual; }
};

/// Substitutes `field` into the coupled system with sixth-order central
/// differences (long double arithmetic) at every sample point
/// x_left + i (length / samples) and time t. The x step is `fd_step`; the
/// t step is fd_step / max(1, max |c_n|), so fast-moving waves shift by
/// about one x step per t step.
ResidualCheck substitution_residual(const CoefficientSet& coeffs, const ExactField& field,
                                    double x_left, double length, std::size_t samples,
                                    double t, double fd_step = 1e-2);

inline constexpr double kOracleResidualTolerance = 1e-9;

}  // namespace ckdv
