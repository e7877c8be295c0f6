#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/error.hpp"

namespace {

using namespace ckdv;

const Stratification kTank{1.23, 0.25};

ModeBasis tank_basis() { return build_constant_n_basis(kTank, std::vector<int>{2, 4, 6, 8, 10}); }

TEST(Dispersion, CubeOfPhaseSpeedOverTwoNSquared) {
  const ModeBasis b = tank_basis();
  const auto d = dispersion_coeffs(b);
  for (std::size_t s = 0; s < b.size(); ++s) {
    const double c = b.mode(s).phase_speed;
    EXPECT_DOUBLE_EQ(d[s], c * c * c / (2 * 1.23 * 1.23));
  }
  EXPECT_NEAR(d[0], 3.8739636086753293e-05, 1e-19);
  EXPECT_NEAR(d[2], 1.4348013365464182e-06, 1e-20);
  EXPECT_NEAR(d[4], 3.0991708869402633e-07, 1e-21);
}

TEST(TripleSine, ClosedFormMatchesQuadrature) {
  const double h = 0.25;
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b)
      for (int c = 1; c <= 6; ++c) {
        const double numeric = simpson(
            [&](double z) {
              return std::sin(a * std::numbers::pi * z / h) * std::cos(b * std::numbers::pi * z / h) *
                     std::sin(c * std::numbers::pi * z / h);
            },
            0.0, h, 2049);
        EXPECT_NEAR(triple_sine_integral(a, b, c, h), numeric, 1e-12)
            << a << "," << b << "," << c;
      }
}

TEST(SelectionRule, MatchesNonzeroPattern) {
  const ModeBasis b = tank_basis();
  const Tensor3 g = nonlinear_coeffs(b, CoefficientMethod::closed_form);
  for (std::size_t n = 0; n < b.size(); ++n)
    for (std::size_t m = 0; m < b.size(); ++m)
      for (std::size_t k = 0; k < b.size(); ++k) {
        if (!selection_rule_allows(b.mode(n).index, b.mode(m).index, b.mode(k).index)) {
          EXPECT_EQ(g(n, m, k), 0.0);
        }
      }
}

TEST(Nonlinear, QuadratureAgreesWithClosedForm) {
  const ModeBasis b = tank_basis();
  const auto agreement =
      compare_methods(nonlinear_coeffs(b, CoefficientMethod::quadrature),
                      nonlinear_coeffs(b, CoefficientMethod::closed_form));
  EXPECT_TRUE(agreement.within(kMethodTolerance)) << agreement.max_relative_gap;
}

TEST(Nonlinear, DiagonalEntriesVanish) {
  // (-1/c_m^2 + 2/c_m^2) Z^m Z^m_z - Z^m Z^m_z / c_m^2 cancels for m = k.
  const Tensor3 g = nonlinear_coeffs(tank_basis(), CoefficientMethod::closed_form);
  for (std::size_t n = 0; n < 5; ++n)
    for (std::size_t m = 0; m < 5; ++m) EXPECT_EQ(g(n, m, m), 0.0);
}

TEST(Nonlinear, FrozenValues) {
  const CoefficientSet c = build_coefficients(tank_basis());
  EXPECT_NEAR(c.nonlinear(0, 0, 1), 158.93239778777891, 1e-9);   // g^2_{2,4}
  EXPECT_NEAR(c.nonlinear(0, 1, 0), 28.896799597777989, 1e-9);   // g^2_{4,2}
  EXPECT_NEAR(c.nonlinear(0, 1, 2), 664.62639074889375, 1e-9);   // g^2_{4,6}
  EXPECT_NEAR(c.nonlinear(0, 2, 1), -130.035598190001, 1e-9);    // g^2_{6,4}
  EXPECT_NEAR(c.nonlinear(0, 4, 3), -1661.5659768722346, 1e-8);  // g^2_{10,8}
  EXPECT_NEAR(c.nonlinear(1, 0, 2), 93.914598692778455, 1e-9);   // g^4_{2,6}
}

TEST(Nonlinear, SigmaIsNotFoldedIntoTheTensor) {
  const ModeBasis b = tank_basis();
  const CoefficientSet one = build_coefficients(b, 1.0);
  const CoefficientSet half = build_coefficients(b, 0.5);
  EXPECT_EQ(one.nonlinear, half.nonlinear);
  EXPECT_EQ(half.sigma, 0.5);
}

TEST(Reconciliation, ClassifiesEveryEntry) {
  const ModeBasis b = tank_basis();
  const DiscrepancyLog log = reconcile_with_reference_tables(b, build_coefficients(b));
  EXPECT_EQ(log.count("c", Verdict::confirmed) + log.count("c", Verdict::discrepant), 5u);
  EXPECT_EQ(log.count("d", Verdict::confirmed) + log.count("d", Verdict::discrepant), 5u);
  EXPECT_EQ(log.count("g", Verdict::confirmed) + log.count("g", Verdict::discrepant), 125u);
}

TEST(Reconciliation, SpotValuesAreLoggedWithBothNumbers) {
  const ModeBasis b = tank_basis();
  const DiscrepancyLog log = reconcile_with_reference_tables(b, build_coefficients(b));
  const DiscrepancyEntry* g224 = log.find("g", 2, 2, 4);
  ASSERT_NE(g224, nullptr);
  EXPECT_NEAR(g224->reference, 72.3, 1e-12);
  EXPECT_NEAR(g224->computed, 158.93239778777891, 1e-9);
  EXPECT_EQ(g224->verdict, Verdict::discrepant);
  const DiscrepancyEntry* g422 = log.find("g", 4, 2, 2);
  ASSERT_NE(g422, nullptr);
  EXPECT_NEAR(g422->reference, 28.9, 1e-12);
  EXPECT_EQ(g422->computed, 0.0);
}

TEST(Reconciliation, KnownDisagreementsWithPrintedValues) {
  const ModeBasis b = tank_basis();
  const DiscrepancyLog log = reconcile_with_reference_tables(b, build_coefficients(b));
  EXPECT_EQ(log.count("c", Verdict::discrepant), 2u);  // c_2, c_4: printed values rounded
  EXPECT_EQ(log.count("d", Verdict::discrepant), 2u);  // d_6, d_8
  EXPECT_EQ(log.mask_mismatches.size(), 3u);
}

TEST(Tables, WritersEmitOneRowPerEntry) {
  const ModeBasis b = tank_basis();
  const CoefficientSet c = build_coefficients(b);
  std::ostringstream modes, g;
  write_mode_table(modes, b, c);
  write_nonlinear_table(g, c);
  auto rows = [](const std::string& text) {
    std::size_t n = 0;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
      if (!line.empty() && line[0] != '#') ++n;
    return n;
  };
  EXPECT_EQ(rows(modes.str()), 5u);
  EXPECT_EQ(rows(g.str()), 125u);
  EXPECT_EQ(g.str().find("\t-0\n"), std::string::npos);
}

TEST(SingleMode, HoldsGivenValues) {
  const CoefficientSet c = single_mode_coefficients(1.5, 6.0, 0.5, 3);
  EXPECT_EQ(c.mode_indices, std::vector<int>{3});
  EXPECT_EQ(c.phase_speed[0], 1.5);
  EXPECT_EQ(c.nonlinear(0, 0, 0), 6.0);
  EXPECT_EQ(c.dispersion[0], 0.5);
}

}  // namespace
