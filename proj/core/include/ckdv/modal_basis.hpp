#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ckdv {

/// Background state of the waveguide: constant buoyancy frequency N (1/s)
/// over a fluid layer of depth h (m).
struct Stratification {
  double buoyancy_frequency = 0.0;
  double depth = 0.0;

  void validate() const;
  friend bool operator==(const Stratification&, const Stratification&) = default;
};

using Profile = std::function<double(double)>;

/// sin(pi x) and cos(pi x) with exact zeros at integer (resp. half-integer)
/// arguments, so eigenfunctions vanish bit-exactly on the walls.
double sin_pi(double x);
double cos_pi(double x);

/// One vertical mode Z^n(z) = B_n sin(n pi z / h) with phase speed c_n.
struct Mode {
  int index = 0;
  double phase_speed = 0.0;
  double amplitude = 0.0;
};

/// Vertical eigenfunctions of Z'' + (N^2 / c^2) Z = 0, Z(0) = Z(h) = 0,
/// normalized under the N^2-weighted inner product. Immutable.
class ModeBasis {
 public:
  ModeBasis(Stratification strat, std::vector<Mode> modes);

  const Stratification& stratification() const { return strat_; }
  std::span<const Mode> modes() const { return modes_; }
  const Mode& mode(std::size_t slot) const { return modes_.at(slot); }
  std::size_t size() const { return modes_.size(); }
  std::vector<int> indices() const;
  std::optional<std::size_t> slot_of(int index) const;

  /// Vertical wavenumber n pi / h of the mode in `slot`.
  double wavenumber(std::size_t slot) const;
  double eigenfunction(std::size_t slot, double z) const;
  double eigenfunction_dz(std::size_t slot, double z) const;
  Profile profile(std::size_t slot) const;

 private:
  Stratification strat_;
  std::vector<Mode> modes_;
};

/// Closed-form basis for constant N: c_n = N h / (n pi), B_n = sqrt(2 / (N^2 h)).
/// Throws ConfigError for non-positive or duplicate indices.
ModeBasis build_constant_n_basis(const Stratification& strat,
                                 std::span<const int> mode_indices);

inline constexpr int kDefaultQuadPoints = 1025;
inline constexpr int kMinQuadPoints = 16;

/// Composite Simpson rule on a uniform grid over [a, b]; O(dz^4). An even
/// point count is rounded up to the next odd one.
double simpson(const Profile& f, double a, double b, int points);

/// (f, g) = integral over [0, h] of N^2 f g dz.
double weighted_inner_product(const Profile& f, const Profile& g,
                              const Stratification& strat,
                              int quad_points = kDefaultQuadPoints);

struct Projection {
  std::vector<double> coefficients;  // (Z^j, phi) per basis slot
  double profile_energy = 0.0;       // (phi, phi)
  double captured_energy = 0.0;      // sum of coefficients^2
  double residual_fraction = 0.0;    // 1 - captured / profile energy
};

Projection project_profile(const Profile& phi, const ModeBasis& basis,
                           int quad_points = kDefaultQuadPoints);

/// sum_j coeffs[j] Z^j(z)
double synthesize_profile(const ModeBasis& basis, std::span<const double> coeffs,
                          double z);

}  // namespace ckdv
