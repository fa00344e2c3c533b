#include <benchmark/benchmark.h>

#include "thinflow/dynamics.hpp"
#include "thinflow/initial_conditions.hpp"
#include "thinflow/integrator.hpp"
#include "thinflow/noise.hpp"
#include "thinflow/transform.hpp"

using namespace thinflow;

namespace {

GridSpec grid_for(const benchmark::State& state) {
  const int n = int(state.range(0));
  return GridSpec{n, n, n / 2};
}

void BM_RoundTripTransform(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const State s = make_initial_state(g, InitialConditionSpec{}, 1);
  for (auto _ : state) {
    SpectralField back = to_spectral(to_physical(s.v));
    benchmark::DoNotOptimize(back);
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.physical_size()) * 2);
}

void BM_Drift(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const State s = make_initial_state(g, InitialConditionSpec{}, 1);
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(8, 0.5));
  ModelVariant v;
  v.kind = ModelKind(state.range(1));
  for (auto _ : state) {
    Tendency t = rhs_drift(s, v, noise, PhysicalConstants{});
    benchmark::DoNotOptimize(t);
  }
}

void BM_Step(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  State s = make_initial_state(g, InitialConditionSpec{}, 1);
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(8, 0.5));
  const BrownianDriver driver(3, 2.5e-3);
  ModelVariant v;
  v.kind = ModelKind(state.range(1));
  std::uint64_t n = 0;
  for (auto _ : state) {
    s = step(s, v, noise, PhysicalConstants{}, driver, n++, 2.5e-3);
  }
}

}  // namespace

BENCHMARK(BM_RoundTripTransform)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Drift)->ArgsProduct({{32}, {0, 1, 2, 3}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step)->ArgsProduct({{16, 32}, {1, 3}})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
