#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ckdv/error.hpp"
#include "ckdv/modal_basis.hpp"

namespace {

using namespace ckdv;

const Stratification kTank{1.23, 0.25};

ModeBasis tank_basis(std::vector<int> modes = {2, 4, 6, 8, 10}) {
  return build_constant_n_basis(kTank, modes);
}

TEST(ModalBasis, PhaseSpeedsFollowClosedForm) {
  const ModeBasis b = tank_basis();
  for (std::size_t s = 0; s < b.size(); ++s) {
    const int n = b.mode(s).index;
    EXPECT_DOUBLE_EQ(b.mode(s).phase_speed, 1.23 * 0.25 / (n * std::numbers::pi));
  }
  EXPECT_NEAR(b.mode(0).phase_speed, 0.048940145000757815, 1e-17);
  EXPECT_NEAR(b.mode(4).phase_speed, 0.009788029000151563, 1e-17);
}

TEST(ModalBasis, AmplitudeIsSharedAcrossModes) {
  const ModeBasis b = tank_basis();
  const double expected = std::sqrt(2.0 / (1.23 * 1.23 * 0.25));
  for (const Mode& m : b.modes()) EXPECT_DOUBLE_EQ(m.amplitude, expected);
  EXPECT_NEAR(expected, 2.2995342477611302, 1e-15);
}

TEST(ModalBasis, EigenfunctionsVanishExactlyOnWalls) {
  const ModeBasis b = tank_basis({1, 2, 3, 7, 10, 33});
  for (std::size_t s = 0; s < b.size(); ++s) {
    EXPECT_EQ(b.eigenfunction(s, 0.0), 0.0);
    EXPECT_EQ(b.eigenfunction(s, kTank.depth), 0.0);
  }
}

TEST(ModalBasis, SinPiHasExactZeros) {
  for (int k = -5; k <= 5; ++k) {
    EXPECT_EQ(sin_pi(k), 0.0);
    EXPECT_EQ(cos_pi(k + 0.5), 0.0);
  }
  EXPECT_NEAR(sin_pi(0.25), std::sqrt(0.5), 4e-16);
}

TEST(ModalBasis, OrthonormalUnderWeightedInnerProduct) {
  const ModeBasis b = tank_basis({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t n = 0; n < b.size(); ++n) {
      const double ip = weighted_inner_product(b.profile(j), b.profile(n), kTank);
      EXPECT_NEAR(ip, j == n ? 1.0 : 0.0, 1e-10) << "pair " << j << "," << n;
    }
}

TEST(ModalBasis, EigenfunctionSatisfiesSturmLiouville) {
  // Z'' + (N^2 / c^2) Z = 0, checked by central differences at random depths.
  const ModeBasis b = tank_basis();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> depth(0.01, 0.24);
  const double h = 1e-4;
  for (int trial = 0; trial < 50; ++trial) {
    const double z = depth(rng);
    for (std::size_t s = 0; s < b.size(); ++s) {
      const double zpp = (b.eigenfunction(s, z + h) - 2.0 * b.eigenfunction(s, z) +
                          b.eigenfunction(s, z - h)) / (h * h);
      const double k2 = std::pow(1.23 / b.mode(s).phase_speed, 2);
      const double scale = k2 * b.mode(s).amplitude;
      EXPECT_NEAR(zpp + k2 * b.eigenfunction(s, z), 0.0, 1e-4 * scale);
    }
  }
}

TEST(ModalBasis, DerivativeMatchesFiniteDifference) {
  const ModeBasis b = tank_basis();
  const double h = 1e-6;
  for (double z : {0.0, 0.03, 0.125, 0.2}) {
    for (std::size_t s = 0; s < b.size(); ++s) {
      const double fd = (b.eigenfunction(s, z + h) - b.eigenfunction(s, z - h)) / (2 * h);
      EXPECT_NEAR(b.eigenfunction_dz(s, z), fd, 1e-5 * std::abs(b.wavenumber(s)));
    }
  }
}

TEST(ModalBasis, RejectsBadModes) {
  EXPECT_THROW(build_constant_n_basis(kTank, std::vector<int>{0}), ConfigError);
  EXPECT_THROW(build_constant_n_basis(kTank, std::vector<int>{-2}), ConfigError);
  EXPECT_THROW(build_constant_n_basis(kTank, std::vector<int>{2, 2}), ConfigError);
  EXPECT_THROW(build_constant_n_basis({0.0, 0.25}, std::vector<int>{1}), ConfigError);
  EXPECT_THROW(build_constant_n_basis({1.23, -1.0}, std::vector<int>{1}), ConfigError);
}

TEST(ModalBasis, SlotLookup) {
  const ModeBasis b = tank_basis();
  EXPECT_EQ(b.slot_of(6), 2u);
  EXPECT_FALSE(b.slot_of(3).has_value());
  EXPECT_EQ(b.indices(), (std::vector<int>{2, 4, 6, 8, 10}));
}

TEST(Simpson, ExactForCubics) {
  const double v = simpson([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0, 5);
  EXPECT_NEAR(v, 4.0 - 4.0 + 2.0, 1e-14);
}

TEST(Simpson, FourthOrderConvergence) {
  auto f = [](double x) { return std::exp(x); };
  const double exact = std::exp(1.0) - 1.0;
  const double e1 = std::abs(simpson(f, 0.0, 1.0, 9) - exact);
  const double e2 = std::abs(simpson(f, 0.0, 1.0, 17) - exact);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.1);
}

TEST(Projection, ModeProjectsOntoItself) {
  const ModeBasis b = tank_basis();
  const Projection p = project_profile(b.profile(1), b);
  for (std::size_t s = 0; s < b.size(); ++s) {
    EXPECT_NEAR(p.coefficients[s], s == 1 ? 1.0 : 0.0, 1e-12);
  }
  EXPECT_NEAR(p.residual_fraction, 0.0, 1e-12);
}

TEST(Projection, CapturedEnergyNeverExceedsProfileEnergy) {
  // Bessel's inequality on random smooth profiles.
  const ModeBasis b = tank_basis({1, 2, 3, 4, 5});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = coef(rng), c = coef(rng), e = coef(rng);
    auto phi = [=](double z) { return z * (0.25 - z) * (a + c * z + e * std::cos(40 * z)); };
    const Projection p = project_profile(phi, b);
    EXPECT_LE(p.captured_energy, p.profile_energy * (1 + 1e-12));
    EXPECT_GE(p.residual_fraction, -1e-12);
  }
}

TEST(Projection, SynthesisInvertsProjectionOnSpan) {
  const ModeBasis b = tank_basis();
  const std::vector<double> coeffs = {0.3, -0.2, 0.1, 0.05, -0.01};
  auto phi = [&](double z) { return synthesize_profile(b, coeffs, z); };
  const Projection p = project_profile(phi, b);
  for (std::size_t s = 0; s < b.size(); ++s) EXPECT_NEAR(p.coefficients[s], coeffs[s], 1e-12);
}

}  // namespace
