#include <benchmark/benchmark.h>

#include "ckdv/coeff_engine.hpp"
#include "ckdv/field.hpp"
#include "ckdv/scenario.hpp"

namespace {

using namespace ckdv;

struct Tank {
  ScenarioConfig cfg = mcewan_default();
  ModeBasis basis = make_basis(cfg);
  CoefficientSet coeffs = make_coefficients(cfg, basis);
  Grid grid = make_grid(cfg);
  InitialState init = build_initial_state(cfg, basis, grid);
  double tau = make_scheme_params(cfg, grid, coeffs).tau;
};

const Tank& tank() {
  static const Tank t;
  return t;
}

void BM_TwoStageStep(benchmark::State& state) {
  const Tank& t = tank();
  ModeState u = t.init.state;
  for (auto _ : state) {
    u = full_step(u, half_step(u, t.coeffs, t.grid, t.tau), t.coeffs, t.grid, t.tau);
    benchmark::DoNotOptimize(u.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.grid.n_points));
}
BENCHMARK(BM_TwoStageStep);

void BM_OneStageStep(benchmark::State& state) {
  const Tank& t = tank();
  ModeState u = t.init.state;
  for (auto _ : state) {
    u = one_stage_step(u, t.coeffs, t.grid, 1e-9);
    benchmark::DoNotOptimize(u.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.grid.n_points));
}
BENCHMARK(BM_OneStageStep);

void BM_NonlinearCoeffs(benchmark::State& state) {
  const auto method = static_cast<CoefficientMethod>(state.range(0));
  const Tank& t = tank();
  for (auto _ : state) benchmark::DoNotOptimize(nonlinear_coeffs(t.basis, method));
}
BENCHMARK(BM_NonlinearCoeffs)
    ->Arg(static_cast<int>(CoefficientMethod::quadrature))
    ->Arg(static_cast<int>(CoefficientMethod::closed_form));

void BM_Synthesize(benchmark::State& state) {
  const Tank& t = tank();
  const int z_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(t.basis, t.init.state, t.grid, z_points));
}
BENCHMARK(BM_Synthesize)->Arg(65)->Arg(129);

}  // namespace

BENCHMARK_MAIN();
