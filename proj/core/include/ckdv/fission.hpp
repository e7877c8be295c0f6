#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ckdv/solver.hpp"

namespace ckdv {

/// Bound states of -psi'' - u0(X) psi = lambda psi, the spectral problem of
/// u_T + 6 u u_X + u_XXX = 0. Each lambda = -kappa^2 < 0 becomes a soliton of
/// amplitude 2 kappa^2.
struct ScatteringSpectrum {
  std::vector<double> kappas;      // descending
  std::vector<double> amplitudes;  // 2 kappa^2, canonical units
  double half_width = 0.0;         // X-domain [-half_width, half_width]
  std::size_t points = 0;
  std::size_t count() const { return kappas.size(); }
};

/// Second-order finite differences on a clamped (Dirichlet) grid of
/// `points` interior nodes; the symmetric tridiagonal matrix is
/// diagonalised directly.
ScatteringSpectrum scattering_spectrum(const std::function<double(double)>& potential,
                                       double half_width, std::size_t points = 8192);

enum class PulseShape { sech2, sech };

/// Maps theta_t + c theta_x + g theta theta_x + d theta_xxx = 0 onto the
/// canonical equation: x - c t = w X, t = (w^3 / d) T, theta = gamma u with
/// gamma = 6 d / (g w^2).
struct CanonicalScaling {
  double width = 1.0;
  double gamma = 1.0;
  double time_scale = 1.0;  // w^3 / d
};

CanonicalScaling canonical_scaling(double nonlinear, double dispersion, double width);

struct CrestCriteria {
  double floor_fraction = 0.05;       // of the snapshot's global maximum
  double amplitude_tolerance = 0.10;  // relative change allowed between snapshots
  /// A soliton of amplitude A moves at c + g A / 3; the measured excess over
  /// c must match g A / 3 to this relative tolerance. Dispersive ripples move
  /// slower than c and fail this test.
  double speed_tolerance = 0.5;
};

struct Crest {
  double x = 0.0;
  double amplitude = 0.0;
  double speed = 0.0;
};

/// Local maxima above the floor, refined to sub-grid position and height by
/// a three-point parabola. Sorted by x.
std::vector<Crest> find_crests(const ModeState& state, const Grid& grid,
                               double floor_fraction, std::size_t slot = 0);

/// Crests of the last snapshot that can be followed back through every
/// earlier snapshot with consistent amplitude and soliton speed. Sorted by
/// decreasing amplitude.
std::vector<Crest> persistent_crests(std::span<const ModeState> snapshots, const Grid& grid,
                                     double phase_speed, double nonlinear,
                                     const CrestCriteria& criteria);

struct FissionSetup {
  double phase_speed = 0.0;
  double nonlinear = 6.0;
  double dispersion = 1.0;
  double amplitude = 2.0;
  double width = 1.0;
  PulseShape shape = PulseShape::sech2;
  double dx = 0.05;
  double t_end = 1.0;
  double tau = 0.0;  // 0: growth-limited step
  double growth_budget = 5.0;
  std::size_t eigen_points = 8192;
  CrestCriteria criteria;
};

/// Canonical pulse u0 sech^2(X) (c = 0, g = 6, d = 1, w = 1).
FissionSetup canonical_fission_setup(double u0);

struct FissionReport {
  double amplitude = 0.0;
  double width = 0.0;
  double canonical_amplitude = 0.0;  // U0
  ScatteringSpectrum spectrum;
  std::vector<double> predicted_amplitudes;  // physical units
  std::size_t predicted_count = 0;
  /// Predicted solitons whose lead over the linear speed, g A t_end / 3,
  /// is at least two of their own widths by t_end; slower ones cannot have
  /// separated from the pulse yet.
  std::size_t resolvable_count = 0;
  std::vector<Crest> crests;  // persistent, by decreasing amplitude
  std::size_t detected_count = 0;
  Grid grid;
  double tau = 0.0;
  std::size_t steps = 0;
};

/// Predicts the soliton count from the scattering spectrum of the rescaled
/// pulse and counts persistent crests of the simulated pulse in snapshots at
/// 0.8, 0.9 and 1.0 t_end.
FissionReport fission_census(const FissionSetup& setup);

void write_fission_report(std::ostream& os, const FissionReport& report);

}  // namespace ckdv
