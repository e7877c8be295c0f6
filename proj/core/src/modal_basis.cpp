#include "ckdv/modal_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "ckdv/error.hpp"

namespace ckdv {

void Stratification::validate() const {
  if (!(buoyancy_frequency > 0.0) || !std::isfinite(buoyancy_frequency)) {
    throw ConfigError("stratification: buoyancy frequency N must be > 0");
  }
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw ConfigError("stratification: depth h must be > 0");
  }
}

double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;
  return sign * std::sin(std::numbers::pi * r);
}

double cos_pi(double x) { return sin_pi(x + 0.5); }

ModeBasis::ModeBasis(Stratification strat, std::vector<Mode> modes)
    : strat_(strat), modes_(std::move(modes)) {
  strat_.validate();
  if (modes_.empty()) throw ConfigError("mode basis: empty mode list");
}

std::vector<int> ModeBasis::indices() const {
  std::vector<int> out;
  out.reserve(modes_.size());
  for (const auto& m : modes_) out.push_back(m.index);
  return out;
}

std::optional<std::size_t> ModeBasis::slot_of(int index) const {
  for (std::size_t s = 0; s < modes_.size(); ++s) {
    if (modes_[s].index == index) return s;
  }
  return std::nullopt;
}

double ModeBasis::wavenumber(std::size_t slot) const {
  return modes_.at(slot).index * std::numbers::pi / strat_.depth;
}

double ModeBasis::eigenfunction(std::size_t slot, double z) const {
  const Mode& m = modes_.at(slot);
  return m.amplitude * sin_pi(m.index * (z / strat_.depth));
}

double ModeBasis::eigenfunction_dz(std::size_t slot, double z) const {
  const Mode& m = modes_.at(slot);
  return m.amplitude * wavenumber(slot) * cos_pi(m.index * (z / strat_.depth));
}

Profile ModeBasis::profile(std::size_t slot) const {
  const Mode m = modes_.at(slot);
  const double depth = strat_.depth;
  return [m, depth](double z) { return m.amplitude * sin_pi(m.index * (z / depth)); };
}

ModeBasis build_constant_n_basis(const Stratification& strat,
                                 std::span<const int> mode_indices) {
  strat.validate();
  if (mode_indices.empty()) throw ConfigError("mode list is empty");
  std::set<int> seen;
  const double n_freq = strat.buoyancy_frequency;
  const double depth = strat.depth;
  const double amplitude = std::sqrt(2.0 / (n_freq * n_freq * depth));
  std::vector<Mode> modes;
  modes.reserve(mode_indices.size());
  for (int n : mode_indices) {
    if (n < 1) {
      throw ConfigError("mode index must be >= 1, got " + std::to_string(n));
    }
    if (!seen.insert(n).second) {
      throw ConfigError("duplicate mode index " + std::to_string(n));
    }
    modes.push_back({n, n_freq * depth / (n * std::numbers::pi), amplitude});
  }
  return ModeBasis(strat, std::move(modes));
}

double simpson(const Profile& f, double a, double b, int points) {
  if (points < 3) throw ConfigError("simpson: need at least 3 points");
  if (points % 2 == 0) ++points;
  const int intervals = points - 1;
  const double dz = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    const double z = a + i * dz;
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(z);
  }
  return sum * dz / 3.0;
}

double weighted_inner_product(const Profile& f, const Profile& g,
                              const Stratification& strat, int quad_points) {
  if (quad_points < kMinQuadPoints) {
    throw ConfigError("inner product: quad_points must be >= 16");
  }
  const double n2 = strat.buoyancy_frequency * strat.buoyancy_frequency;
  return n2 * simpson([&](double z) { return f(z) * g(z); }, 0.0, strat.depth,
                      quad_points);
}

Projection project_profile(const Profile& phi, const ModeBasis& basis,
                           int quad_points) {
  Projection out;
  out.coefficients.reserve(basis.size());
  for (std::size_t s = 0; s < basis.size(); ++s) {
    out.coefficients.push_back(weighted_inner_product(
        basis.profile(s), phi, basis.stratification(), quad_points));
  }
  out.profile_energy =
      weighted_inner_product(phi, phi, basis.stratification(), quad_points);
  for (double c : out.coefficients) out.captured_energy += c * c;
  out.residual_fraction = out.profile_energy > 0.0
                              ? 1.0 - out.captured_energy / out.profile_energy
                              : 0.0;
  return out;
}

double synthesize_profile(const ModeBasis& basis, std::span<const double> coeffs,
                          double z) {
  if (coeffs.size() != basis.size()) {
    throw ConfigError("synthesize_profile: coefficient count != basis size");
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < basis.size(); ++s) {
    sum += coeffs[s] * basis.eigenfunction(s, z);
  }
  return sum;
}

}  // namespace ckdv
