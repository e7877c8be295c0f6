#include "ckdv/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ckdv/error.hpp"

namespace ckdv {

namespace {

long double sech2(long double s) {
  const long double c = std::cosh(s);
  return 1.0L / (c * c);
}

}  // namespace

SolitonOracle::SolitonOracle(double phase_speed, double nonlinear, double dispersion,
                             double amplitude, double x0)
    : c_(phase_speed), g_(nonlinear), d_(dispersion), a_(amplitude), x0_(x0) {
  if (g_ == 0.0) throw ConfigError("soliton oracle: nonlinear coefficient must be nonzero");
  if (!(d_ > 0.0)) throw ConfigError("soliton oracle: dispersion must be > 0");
  if (!(a_ * g_ > 0.0)) throw ConfigError("soliton oracle: amplitude * nonlinear must be > 0");
}

double SolitonOracle::width() const { return std::sqrt(12.0 * d_ / (g_ * a_)); }

long double SolitonOracle::value(long double x, long double t) const {
  const long double v = static_cast<long double>(c_) + static_cast<long double>(g_) * a_ / 3.0L;
  const long double w = std::sqrt(12.0L * d_ / (static_cast<long double>(g_) * a_));
  return a_ * sech2((x - x0_ - v * t) / w);
}

double SolitonOracle::periodic_value(double x, double t, double length) const {
  double s = std::fmod(x - x0_ - speed() * t, length);
  if (s < -0.5 * length) s += length;
  if (s >= 0.5 * length) s -= length;
  return a_ * static_cast<double>(sech2(s / width()));
}

ModeState SolitonOracle::sample(const Grid& grid, double t, int mode_index) const {
  ModeState s({mode_index}, grid.n_points, t);
  auto theta = s.mode(0);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    theta[i] = periodic_value(grid.x(i), t, grid.length());
  }
  return s;
}

CoefficientSet SolitonOracle::coefficients(int mode_index) const {
  return single_mode_coefficients(c_, g_, d_, mode_index);
}

CoupledPairOracle::CoupledPairOracle(CoefficientSet coeffs, double kappa,
                                     std::array<double, 2> amplitudes, double x0)
    : coeffs_(std::move(coeffs)), kappa_(kappa), amp_(amplitudes), x0_(x0) {
  coeffs_.validate();
  if (coeffs_.size() != 2) throw ConfigError("coupled pair: needs exactly two modes");
  if (!(kappa_ > 0.0)) throw ConfigError("coupled pair: kappa must be > 0");
}

double CoupledPairOracle::speed() const {
  return coeffs_.phase_speed[0] + 4.0 * kappa_ * kappa_ * coeffs_.beta2 * coeffs_.dispersion[0];
}

double CoupledPairOracle::constraint_residual() const {
  const double k2 = kappa_ * kappa_;
  double worst = 0.0;
  for (std::size_t n = 0; n < 2; ++n) {
    const double dn = coeffs_.beta2 * coeffs_.dispersion[n];
    const double v_n = coeffs_.phase_speed[n] + 4.0 * k2 * dn;
    worst = std::max(worst, std::abs(v_n - speed()) /
                                std::max({std::abs(coeffs_.phase_speed[n]), 4.0 * k2 * dn,
                                          std::abs(speed())}));
    double quad = 0.0;
    double scale = 12.0 * k2 * dn * std::abs(amp_[n]);
    for (std::size_t m = 0; m < 2; ++m)
      for (std::size_t k = 0; k < 2; ++k) {
        const double term = coeffs_.sigma * coeffs_.nonlinear(n, m, k) * amp_[m] * amp_[k];
        quad += term;
        scale = std::max(scale, std::abs(term));
      }
    worst = std::max(worst, std::abs(quad - 12.0 * k2 * dn * amp_[n]) / scale);
  }
  return worst;
}

long double CoupledPairOracle::value(std::size_t slot, long double x, long double t) const {
  const long double v = static_cast<long double>(coeffs_.phase_speed[0]) +
                        4.0L * kappa_ * kappa_ * coeffs_.beta2 * coeffs_.dispersion[0];
  return amp_.at(slot) * sech2(kappa_ * (x - x0_ - v * t));
}

ModeState CoupledPairOracle::sample(const Grid& grid, double t) const {
  ModeState s(coeffs_.mode_indices, grid.n_points, t);
  const double length = grid.length();
  for (std::size_t slot = 0; slot < 2; ++slot) {
    auto theta = s.mode(slot);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
      double u = std::fmod(grid.x(i) - x0_ - speed() * t, length);
      if (u < -0.5 * length) u += length;
      if (u >= 0.5 * length) u -= length;
      theta[i] = amp_[slot] * static_cast<double>(sech2(kappa_ * u));
    }
  }
  return s;
}

CoupledPairOracle make_coupled_pair(double kappa, double c1, std::array<double, 2> d,
                                    const Tensor3& g, double x0) {
  if (g.extent() != 2) throw ConfigError("coupled pair: g must be 2x2x2");
  if (!(d[0] > 0.0) || !(d[1] > 0.0)) throw ConfigError("coupled pair: d must be > 0");
  const double k2 = kappa * kappa;

  CoefficientSet coeffs;
  coeffs.mode_indices = {1, 2};
  coeffs.phase_speed = {c1, c1 + 4.0 * k2 * (d[0] - d[1])};
  coeffs.dispersion = {d[0], d[1]};
  coeffs.nonlinear = g;

  Eigen::Vector2d a;
  for (int n = 0; n < 2; ++n) {
    const double diag = g(n, n, n);
    a(n) = diag != 0.0 ? 12.0 * k2 * d[n] / diag : 1.0;
  }
  bool converged = false;
  for (int iter = 0; iter < 100 && !converged; ++iter) {
    Eigen::Vector2d f;
    Eigen::Matrix2d jac;
    for (int n = 0; n < 2; ++n) {
      f(n) = -12.0 * k2 * d[n] * a(n);
      for (int j = 0; j < 2; ++j) {
        jac(n, j) = j == n ? -12.0 * k2 * d[n] : 0.0;
        for (int k = 0; k < 2; ++k) {
          jac(n, j) += (g(n, j, k) + g(n, k, j)) * a(k);
        }
        for (int k = 0; k < 2; ++k) f(n) += g(n, j, k) * a(j) * a(k);
      }
    }
    const Eigen::Vector2d step = jac.fullPivLu().solve(f);
    if (!step.allFinite()) break;
    a -= step;
    converged = step.norm() <= 1e-15 * std::max(1.0, a.norm());
  }
  if (!converged || !a.allFinite() || std::abs(a(0)) < 1e-12 || std::abs(a(1)) < 1e-12) {
    throw ConsistencyError("coupled pair: amplitude equations did not converge");
  }
  return CoupledPairOracle(std::move(coeffs), kappa, {a(0), a(1)}, x0);
}

CoupledPairOracle default_coupled_pair() {
  Tensor3 g(2);
  g(0, 0, 0) = 6.0;
  g(0, 0, 1) = 1.0;
  g(0, 1, 0) = 0.5;
  g(0, 1, 1) = 0.3;
  g(1, 0, 0) = 0.4;
  g(1, 0, 1) = 0.8;
  g(1, 1, 0) = 0.2;
  g(1, 1, 1) = 3.0;
  return make_coupled_pair(1.0, 96.0, {1.0, 0.5}, g);
}

namespace {

constexpr std::array<long double, 7> kFirst = {-1.0L / 60, 3.0L / 20, -3.0L / 4, 0.0L,
                                               3.0L / 4,   -3.0L / 20, 1.0L / 60};
constexpr std::array<long double, 9> kThird = {-7.0L / 240,  3.0L / 10,   -169.0L / 120,
                                               61.0L / 30,   0.0L,        -61.0L / 30,
                                               169.0L / 120, -3.0L / 10,  7.0L / 240};

}  // namespace

ResidualCheck substitution_residual(const CoefficientSet& coeffs, const ExactField& field,
                                    double x_left, double length, std::size_t samples,
                                    double t, double fd_step) {
  coeffs.validate();
  if (samples == 0 || !(length > 0.0) || !(fd_step > 0.0)) {
    throw ConfigError("substitution_residual: bad sampling parameters");
  }
  const std::size_t modes = coeffs.size();
  const long double h = fd_step;
  // A pulse moving at ~c covers c * tk in time tk; keep that shift near h.
  double fastest = 1.0;
  for (double c : coeffs.phase_speed) fastest = std::max(fastest, std::abs(c));
  const long double tk = h / fastest;
  ResidualCheck out;
  std::vector<long double> u(modes), ux(modes), ut(modes), uxxx(modes);
  for (std::size_t i = 0; i < samples; ++i) {
    const long double x = x_left + length * static_cast<long double>(i) / samples;
    for (std::size_t s = 0; s < modes; ++s) {
      u[s] = field(s, x, t);
      long double dx1 = 0.0L;
      long double dt1 = 0.0L;
      for (int j = -3; j <= 3; ++j) {
        dx1 += kFirst[j + 3] * field(s, x + j * h, t);
        dt1 += kFirst[j + 3] * field(s, x, t + j * tk);
      }
      long double dx3 = 0.0L;
      for (int j = -4; j <= 4; ++j) dx3 += kThird[j + 4] * field(s, x + j * h, t);
      ux[s] = dx1 / h;
      ut[s] = dt1 / tk;
      uxxx[s] = dx3 / (h * h * h);
    }
    for (std::size_t n = 0; n < modes; ++n) {
      const long double advect = coeffs.phase_speed[n] * ux[n];
      const long double disperse = coeffs.beta2 * coeffs.dispersion[n] * uxxx[n];
      long double nonlinear = 0.0L;
      long double scale = std::max({std::abs(ut[n]), std::abs(advect), std::abs(disperse)});
      for (std::size_t m = 0; m < modes; ++m)
        for (std::size_t k = 0; k < modes; ++k) {
          const long double term = coeffs.sigma * coeffs.nonlinear(n, m, k) * u[m] * ux[k];
          nonlinear += term;
          scale = std::max(scale, std::abs(term));
        }
      const long double r = ut[n] + advect + nonlinear + disperse;
      out.max_residual = std::max(out.max_residual, static_cast<double>(std::abs(r)));
      out.term_scale = std::max(out.term_scale, static_cast<double>(scale));
    }
  }
  return out;
}

}  // namespace ckdv
