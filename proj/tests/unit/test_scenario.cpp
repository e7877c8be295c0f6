#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ckdv/error.hpp"
#include "ckdv/scenario.hpp"

namespace {

using namespace ckdv;

bool has_violation(const ScenarioConfig& cfg, const std::string& field) {
  for (const auto& v : validate(cfg))
    if (v.field == field) return true;
  return false;
}

TEST(Defaults, McEwanTank) {
  const ScenarioConfig cfg = mcewan_default();
  EXPECT_EQ(cfg.strat.buoyancy_frequency, 1.23);
  EXPECT_EQ(cfg.strat.depth, 0.25);
  EXPECT_EQ(cfg.modes, (std::vector<int>{2, 4, 6, 8, 10}));
  EXPECT_EQ(cfg.run.t_end, 0.02);
  EXPECT_EQ(cfg.paddle.z0, 0.125);
  EXPECT_TRUE(validate(cfg).empty());
}

TEST(Defaults, GridCoversPaddedTank) {
  const Grid g = make_grid(mcewan_default());
  EXPECT_EQ(g.n_points, 1024u);
  EXPECT_DOUBLE_EQ(g.x0, -0.5);
  EXPECT_DOUBLE_EQ(g.length(), 1.0);
}

TEST(Defaults, AutomaticStepUsesMargin) {
  const ScenarioConfig cfg = mcewan_default();
  const ModeBasis b = make_basis(cfg);
  const Grid g = make_grid(cfg);
  const SchemeParams p = make_scheme_params(cfg, g, make_coefficients(cfg, b));
  EXPECT_DOUBLE_EQ(p.tau, cfg.scheme.margin * std::pow(g.dx, 4));
}

TEST(Validation, EachRuleNamesItsField) {
  ScenarioConfig c = mcewan_default();
  c.strat.buoyancy_frequency = 0;
  EXPECT_TRUE(has_violation(c, "stratification.buoyancy_frequency"));
  c = mcewan_default();
  c.modes = {2, 2};
  EXPECT_TRUE(has_violation(c, "stratification.modes"));
  c.modes = {};
  EXPECT_TRUE(has_violation(c, "stratification.modes"));
  c = mcewan_default();
  c.paddle.z0 = 0.25;
  EXPECT_TRUE(has_violation(c, "paddle.z0"));
  c = mcewan_default();
  c.paddle.l = 0.001;
  EXPECT_TRUE(has_violation(c, "paddle.l"));
  c = mcewan_default();
  c.grid.padding = 0.5;
  EXPECT_TRUE(has_violation(c, "grid.padding"));
  c = mcewan_default();
  c.scheme.dt = -1;
  EXPECT_TRUE(has_violation(c, "scheme.dt"));
  c = mcewan_default();
  c.run.run_id = "../escape";
  EXPECT_TRUE(has_violation(c, "run.run_id"));
  EXPECT_THROW(require_valid(c), ConfigError);
}

TEST(Validation, FilesystemSafeIds) {
  EXPECT_TRUE(filesystem_safe("mcewan-1_a.b"));
  EXPECT_FALSE(filesystem_safe(""));
  EXPECT_FALSE(filesystem_safe(".."));
  EXPECT_FALSE(filesystem_safe("a/b"));
  EXPECT_FALSE(filesystem_safe("a b"));
}

TEST(Paddle, VerticalProfileIsOddAboutCentre) {
  const ScenarioConfig cfg = mcewan_default();
  for (double dz : {0.01, 0.05, 0.1}) {
    EXPECT_NEAR(cfg.paddle.phi2(0.125 + dz, cfg.strat), -cfg.paddle.phi2(0.125 - dz, cfg.strat),
                4e-15);
  }
  EXPECT_EQ(cfg.paddle.phi2(0.125, cfg.strat), 0.0);
  EXPECT_DOUBLE_EQ(cfg.paddle.phi1(0.0), cfg.paddle.a);
}

TEST(InitialState, FrozenProjection) {
  const ScenarioConfig cfg = mcewan_default();
  const ModeBasis b = make_basis(cfg);
  const InitialState s = build_initial_state(cfg, b, make_grid(cfg));
  const double expected[] = {-0.26081385251126959, 0.2125807043975087, -0.12453924546276481,
                             0.059068819789681731, -0.029948777462414394};
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(s.projection.coefficients[k], expected[k], 1e-9);
  EXPECT_NEAR(s.projection.profile_energy, 0.13329701833578894, 1e-9);
  EXPECT_NEAR(1.0 - s.projection.residual_fraction, 0.998600730977, 1e-9);
  EXPECT_NEAR(s.max_profile_residual, 0.047586307895528535, 1e-9);
  EXPECT_DOUBLE_EQ(s.max_field_residual, std::abs(cfg.paddle.a) * s.max_profile_residual);
  double total = 0;
  for (double f : s.energy_fraction) total += f;
  EXPECT_NEAR(total, 1.0 - s.projection.residual_fraction, 1e-12);
}

TEST(InitialState, ThetaIsCoefficientTimesHorizontalShape) {
  const ScenarioConfig cfg = mcewan_default();
  const ModeBasis b = make_basis(cfg);
  const Grid g = make_grid(cfg);
  const InitialState s = build_initial_state(cfg, b, g);
  for (std::size_t i = 0; i < g.n_points; i += 97) {
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_DOUBLE_EQ(s.state.mode(k)[i], s.projection.coefficients[k] * cfg.paddle.phi1(g.x(i)));
    }
  }
}

TEST(ConfigFile, RoundTripsThroughText) {
  ScenarioConfig cfg = mcewan_default();
  cfg.modes = {1, 3};
  cfg.scheme.scheme = Scheme::one_stage;
  cfg.scheme.full_step_dispersion = FullStepDispersion::unmodified;
  cfg.paddle.l = 0.07;
  cfg.run.run_id = "variant";
  std::istringstream is(config_to_string(cfg));
  EXPECT_EQ(parse_config(is), cfg);
}

TEST(ConfigFile, MissingKeysKeepDefaults) {
  std::istringstream is("[run]\nt_end = 0.5\n");
  ScenarioConfig expected = mcewan_default();
  expected.run.t_end = 0.5;
  EXPECT_EQ(parse_config(is), expected);
}

TEST(ConfigFile, UnknownKeysAndSectionsAreRejected) {
  std::istringstream key("[run]\nt_fin = 0.5\n");
  EXPECT_THROW(parse_config(key), ConfigError);
  std::istringstream section("[solver]\ndt = 1\n");
  EXPECT_THROW(parse_config(section), ConfigError);
  std::istringstream number("[run]\nt_end = soon\n");
  EXPECT_THROW(parse_config(number), ConfigError);
}

TEST(ConfigFile, MissingFileIsAnError) {
  EXPECT_ANY_THROW(load_config("/nonexistent/dir/none.cfg"));
}

TEST(ModeList, ParseAndFormat) {
  EXPECT_EQ(parse_mode_list("2,4, 6"), (std::vector<int>{2, 4, 6}));
  EXPECT_EQ(format_mode_list({2, 4}), "2,4");
  EXPECT_THROW(parse_mode_list("2,x"), ConfigError);
  EXPECT_THROW(parse_mode_list(""), ConfigError);
}

}  // namespace
