#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/error.hpp"
#include "ckdv/snapshot_io.hpp"
#include "ckdv/solver.hpp"

namespace {

using namespace ckdv;

CoefficientSet two_mode_set() {
  CoefficientSet c;
  c.mode_indices = {1, 2};
  c.phase_speed = {1.0, 0.5};
  c.dispersion = {0.02, 0.01};
  c.nonlinear = Tensor3(2);
  c.nonlinear(0, 0, 0) = 3.0;
  c.nonlinear(0, 1, 0) = -1.0;
  c.nonlinear(1, 0, 1) = 0.7;
  c.nonlinear(1, 1, 0) = 2.0;
  c.sigma = 0.8;
  c.beta2 = 1.3;
  return c;
}

ModeState random_state(const std::vector<int>& modes, std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeState s(modes, n);
  for (double& v : s.values()) v = u(rng);
  return s;
}

// Point-by-point evaluation of the semi-discrete operator, written directly
// from the stencil definitions.
std::vector<double> operator_reference(const ModeState& u, const CoefficientSet& c,
                                       const Grid& g, std::vector<double> e) {
  const std::size_t np = g.n_points;
  auto at = [&](std::size_t m, long i) {
    return u.mode(m)[static_cast<std::size_t>((i % static_cast<long>(np) + np) % np)];
  };
  std::vector<double> r(c.size() * np);
  for (std::size_t n = 0; n < c.size(); ++n)
    for (long i = 0; i < static_cast<long>(np); ++i) {
      auto d0 = [&](std::size_t m) { return (at(m, i + 1) - at(m, i - 1)) / (2 * g.dx); };
      const double d3 = (at(n, i + 2) - 2 * at(n, i + 1) + 2 * at(n, i - 1) - at(n, i - 2)) /
                        (2 * g.dx * g.dx * g.dx);
      double v = c.phase_speed[n] * d0(n) + e[n] * d3;
      for (std::size_t m = 0; m < c.size(); ++m)
        for (std::size_t k = 0; k < c.size(); ++k)
          v += c.sigma * c.nonlinear(n, m, k) * at(m, i) * d0(k);
      r[n * np + static_cast<std::size_t>(i)] = v;
    }
  return r;
}

TEST(Stencils, OneStageMatchesDirectEvaluation) {
  const CoefficientSet c = two_mode_set();
  const Grid g = Grid::covering(0.0, 4.0, 32);
  const ModeState u = random_state(c.mode_indices, 32, 3);
  const double tau = 1e-4;
  const ModeState next = one_stage_step(u, c, g, tau);
  const auto r = operator_reference(u, c, g, {c.beta2 * 0.02, c.beta2 * 0.01});
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_NEAR(next.values()[j], u.values()[j] - tau * r[j], 1e-12);
  }
  EXPECT_DOUBLE_EQ(next.time, tau);
}

TEST(Stencils, HalfStepUsesCorrectedDispersion) {
  const CoefficientSet c = two_mode_set();
  const Grid g = Grid::covering(0.0, 4.0, 32);
  const ModeState u = random_state(c.mode_indices, 32, 5);
  const double tau = 1e-4;
  const double h2 = g.dx * g.dx;
  const ModeState half = half_step(u, c, g, tau);
  const auto r = operator_reference(u, c, g,
                                    {c.beta2 * 0.02 - 1.0 * h2 / 6, c.beta2 * 0.01 - 0.5 * h2 / 6});
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_NEAR(half.values()[j], u.values()[j] - 0.5 * tau * r[j], 1e-12);
  }
  const ModeState plain = half_step(u, c, g, tau, false);
  const auto r0 = operator_reference(u, c, g, {c.beta2 * 0.02, c.beta2 * 0.01});
  for (std::size_t j = 0; j < r0.size(); ++j) {
    EXPECT_NEAR(plain.values()[j], u.values()[j] - 0.5 * tau * r0[j], 1e-12);
  }
}

TEST(Stencils, FullStepEvaluatesOperatorAtHalfLevel) {
  const CoefficientSet c = two_mode_set();
  const Grid g = Grid::covering(0.0, 4.0, 32);
  const ModeState u = random_state(c.mode_indices, 32, 8);
  const ModeState half = random_state(c.mode_indices, 32, 9);
  const double tau = 1e-4;
  const double h2 = g.dx * g.dx;
  const ModeState next = full_step(u, half, c, g, tau);
  const auto r = operator_reference(half, c, g,
                                    {c.beta2 * 0.02 - 1.0 * h2 / 6, c.beta2 * 0.01 - 0.5 * h2 / 6});
  for (std::size_t j = 0; j < r.size(); ++j) {
    EXPECT_NEAR(next.values()[j], u.values()[j] - tau * r[j], 1e-12);
  }
  const ModeState unmod = full_step(u, half, c, g, tau, FullStepDispersion::unmodified);
  const auto r0 = operator_reference(half, c, g, {c.beta2 * 0.02, c.beta2 * 0.01});
  for (std::size_t j = 0; j < r0.size(); ++j) {
    EXPECT_NEAR(unmod.values()[j], u.values()[j] - tau * r0[j], 1e-12);
  }
}

TEST(Properties, ZeroStateStaysZero) {
  const CoefficientSet c = two_mode_set();
  const Grid g = Grid::covering(-1.0, 2.0, 64);
  ModeState zero(c.mode_indices, 64);
  SchemeParams p;
  p.tau = 1e-5;
  const auto r = advance(zero, c, g, p, 1e-3);
  EXPECT_EQ(r.state.max_abs(), 0.0);
}

TEST(Properties, MassIsConservedForAnyState) {
  // The centred periodic stencils telescope, and so does the single-mode
  // product u_i (u_{i+1} - u_{i-1}); mass is then conserved to rounding.
  const Grid g = Grid::covering(0.0, 1.0, 64);
  const CoefficientSet linear = [] {
    CoefficientSet c = two_mode_set();
    c.nonlinear = Tensor3(2);
    return c;
  }();
  const CoefficientSet single = single_mode_coefficients(1.0, 6.0, 0.01);
  for (unsigned seed = 0; seed < 10; ++seed) {
    for (const CoefficientSet* c : {&linear, &single}) {
      const ModeState u = random_state(c->mode_indices, 64, seed);
      const ModeState next = one_stage_step(u, *c, g, 1e-3);
      for (std::size_t m = 0; m < c->size(); ++m) {
        double before = 0, after = 0;
        for (double v : u.mode(m)) before += v;
        for (double v : next.mode(m)) after += v;
        EXPECT_NEAR(after, before, 1e-12);
      }
    }
  }
}

TEST(Properties, StepCommutesWithGridShift) {
  const CoefficientSet c = two_mode_set();
  const Grid g = Grid::covering(0.0, 4.0, 40);
  const ModeState u = random_state(c.mode_indices, 40, 21);
  ModeState shifted = u;
  const std::size_t k = 7;
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t i = 0; i < 40; ++i) shifted.mode(m)[(i + k) % 40] = u.mode(m)[i];
  SchemeParams p;
  p.tau = 1e-5;
  const ModeState a = advance(u, c, g, p, 1e-4).state;
  const ModeState b = advance(shifted, c, g, p, 1e-4).state;
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(b.mode(m)[(i + k) % 40], a.mode(m)[i]);
}

TEST(Properties, LinearSchemeMatchesAmplificationFactor) {
  // A single Fourier mode under the linear two-stage scheme is multiplied by
  // G = 1 - i y - y^2 / 2 per step, y = tau * symbol.
  const CoefficientSet c = single_mode_coefficients(1.0, 0.0, 0.01);
  const std::size_t n = 64;
  const Grid g = Grid::covering(0.0, 2.0 * std::numbers::pi, n);
  const int k = 5;
  ModeState u({1}, n);
  for (std::size_t i = 0; i < n; ++i) u.mode(0)[i] = std::cos(k * g.x(i));
  const double tau = 1e-3;
  const ModeState next = full_step(u, half_step(u, c, g, tau), c, g, tau);
  const double xi = k * g.dx;
  const double e = 0.01 - g.dx * g.dx / 6;
  const double symbol = std::sin(xi) / g.dx + e * (std::sin(2 * xi) - 2 * std::sin(xi)) /
                                                  (g.dx * g.dx * g.dx);
  const double y = tau * symbol;
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = k * g.x(i);
    const double expected = (1 - y * y / 2) * std::cos(phase) + y * std::sin(phase);
    EXPECT_NEAR(next.mode(0)[i], expected, 1e-13);
  }
}

TEST(Advance, LandsExactlyOnFinalTime) {
  const CoefficientSet c = single_mode_coefficients(1.0, 1.0, 0.01);
  const Grid g = Grid::covering(0.0, 1.0, 32);
  ModeState u({1}, 32);
  SchemeParams p;
  p.tau = 3e-4;
  const auto r = advance(u, c, g, p, 0.01);
  EXPECT_EQ(r.state.time, 0.01);
  EXPECT_EQ(r.report.steps, 34u);
  EXPECT_LE(r.report.tau, p.tau);
  EXPECT_NEAR(r.report.tau * 34, 0.01, 1e-16);
}

TEST(Advance, ZeroSpanTakesNoSteps) {
  const CoefficientSet c = single_mode_coefficients(1.0, 1.0, 0.01);
  const Grid g = Grid::covering(0.0, 1.0, 32);
  ModeState u({1}, 32);
  SchemeParams p;
  p.tau = 1e-3;
  std::size_t calls = 0;
  AdvanceOptions o;
  o.observer = [&](const ModeState&, std::size_t step) {
    EXPECT_EQ(step, 0u);
    ++calls;
  };
  const auto r = advance(u, c, g, p, 0.0, o);
  EXPECT_EQ(r.report.steps, 0u);
  EXPECT_EQ(calls, 1u);
}

TEST(Advance, ObserverSeesInitialEveryNthAndFinal) {
  const CoefficientSet c = single_mode_coefficients(1.0, 1.0, 0.01);
  const Grid g = Grid::covering(0.0, 1.0, 32);
  ModeState u({1}, 32);
  SchemeParams p;
  p.tau = 1e-3;
  std::vector<std::size_t> seen;
  AdvanceOptions o;
  o.snapshot_every = 4;
  o.observer = [&](const ModeState&, std::size_t step) { seen.push_back(step); };
  advance(u, c, g, p, 0.01, o);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 4, 8, 10}));
}

TEST(Advance, BlowUpRaisesNonFiniteWithLastFiniteState) {
  const CoefficientSet c = single_mode_coefficients(0.0, 0.0, 1.0);
  const Grid g = Grid::covering(0.0, 1.0, 64);
  ModeState u = random_state({1}, 64, 4);
  SchemeParams p;
  p.tau = 1e-2;  // far beyond dx^4
  try {
    advance(u, c, g, p, 100.0);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_GT(e.step(), 0u);
    EXPECT_TRUE(e.last_finite_state().all_finite());
  }
}

TEST(Advance, WarnsWhenStepExceedsMarginBound) {
  const CoefficientSet c = single_mode_coefficients(1.0, 1.0, 0.01);
  const Grid g = Grid::covering(0.0, 1.0, 32);
  ModeState u({1}, 32);
  SchemeParams p;
  p.tau = 1e-3;
  p.margin = 1.0;
  EXPECT_FALSE(advance(u, c, g, p, 0.002).report.warnings.empty());
  p.tau = 0.5 * std::pow(g.dx, 4);
  EXPECT_TRUE(advance(u, c, g, p, 2 * p.tau).report.warnings.empty());
}

TEST(Advance, RejectsMismatchedModesAndBadStep) {
  const CoefficientSet c = single_mode_coefficients(1.0, 1.0, 0.01);
  const Grid g = Grid::covering(0.0, 1.0, 32);
  SchemeParams p;
  p.tau = 1e-3;
  EXPECT_THROW(advance(ModeState({2}, 32), c, g, p, 0.01), ConfigError);
  p.tau = 0.0;
  EXPECT_THROW(advance(ModeState({1}, 32), c, g, p, 0.01), ConfigError);
}

TEST(Timestep, SuggestionFollowsPowerLaws) {
  const CoefficientSet c = single_mode_coefficients(1.0, 1.0, 0.01);
  const Grid g = Grid::covering(0.0, 1.0, 32);
  SchemeParams p;
  p.margin = 2.0;
  EXPECT_DOUBLE_EQ(suggest_timestep(g, c, p), 2.0 * std::pow(g.dx, 4));
  p.scheme = Scheme::one_stage;
  EXPECT_DOUBLE_EQ(suggest_timestep(g, c, p), 2.0 * std::pow(g.dx, 6));
}

TEST(Timestep, GrowthLimitedStepMeetsBudget) {
  const CoefficientSet c = single_mode_coefficients(10.0, 0.0, 1.0);
  const Grid g = Grid::covering(0.0, 10.0, 128);
  const double span = 0.3;
  for (Scheme s : {Scheme::two_stage, Scheme::one_stage}) {
    const double rho = linear_spectral_radius(g, c, s);
    const double tau = growth_limited_timestep(g, c, s, span, 2.0);
    const double y = tau * rho;
    const double per_step = s == Scheme::two_stage ? std::log1p(std::pow(y, 4) / 4)
                                                   : std::log1p(y * y);
    EXPECT_LE(per_step * span / tau, 2.0 * (1 + 1e-9));
  }
}

TEST(Norms, DiscreteL2) {
  const Grid g = Grid::covering(0.0, 2.0, 8);
  ModeState a({1}, 8), b({1}, 8);
  for (std::size_t i = 0; i < 8; ++i) a.mode(0)[i] = 1.0;
  EXPECT_DOUBLE_EQ(discrete_l2_norm(a, g), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(discrete_l2_norm(a, b, g), std::sqrt(2.0));
  EXPECT_THROW(discrete_l2_norm(a, ModeState({1}, 9), g), ConfigError);
}

TEST(Names, SchemeRoundTrip) {
  for (Scheme s : {Scheme::two_stage, Scheme::one_stage})
    EXPECT_EQ(scheme_from_string(to_string(s)), s);
  EXPECT_EQ(scheme_from_string("two_stage"), Scheme::two_stage);
  EXPECT_THROW(scheme_from_string("leapfrog"), ConfigError);
  EXPECT_EQ(full_step_dispersion_from_string("unmodified"), FullStepDispersion::unmodified);
}

TEST(SnapshotIo, RoundTripIsBitExact) {
  const Grid g = Grid::covering(-0.5, 1.0, 16);
  ModeState u = random_state({2, 4}, 16, 99);
  u.time = 0.0123456789;
  std::stringstream ss;
  write_snapshot(ss, u, g, Scheme::two_stage, 42);
  const SnapshotData d = read_snapshot(ss);
  EXPECT_EQ(d.step, 42u);
  EXPECT_EQ(d.scheme, "two-stage");
  EXPECT_EQ(d.state.time, u.time);
  EXPECT_EQ(d.state.mode_indices(), u.mode_indices());
  EXPECT_EQ(d.grid.dx, g.dx);
  EXPECT_EQ(d.grid.x0, g.x0);
  for (std::size_t j = 0; j < u.values().size(); ++j) EXPECT_EQ(d.state.values()[j], u.values()[j]);
}

TEST(SnapshotIo, NumbersUseSeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(snapshot_filename("mcewan", 0.02), "mcewan_t0.02_modes.dat");
  EXPECT_EQ(mode_profile_filename("mcewan", 0.0, 4), "mcewan_t0_mode4.dat");
  EXPECT_EQ(field_filename("x", 1.5), "x_t1.5_field.dat");
}

}  // namespace
