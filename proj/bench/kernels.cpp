// Serial reference kernels against their OpenMP counterparts.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "sinterbench/calibration.hpp"
#include "sinterbench/mc_engine.hpp"
#include "sinterbench/thermal.hpp"

using namespace sinterbench;

namespace {

McConfig ensemble(benchmark::State& state) {
  McConfig mc;
  mc.paths = static_cast<std::size_t>(state.range(0));
  mc.seed = 11;
  mc.collect_iteration_stats = false;
  return mc;
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto mc = ensemble(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble_serial(mc, {}, {}, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto mc = ensemble(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble(mc, {}, {}, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Step>
void grid_kernel(benchmark::State& state) {
  GridSpec spec;
  spec.nx = spec.ny = static_cast<std::size_t>(state.range(0));
  const MaterialParams material;
  const auto center = cell_center(spec, spec.nx / 2, spec.ny / 2, 1);
  auto s = GridState::uniform(spec, spec.boundary_temperature);
  for (auto _ : state) {
    s = Step(s, spec, material, 2.0, center);
    benchmark::DoNotOptimize(s.temps.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(spec.cell_count()));
}

void BM_GridStepSerial(benchmark::State& state) { grid_kernel<step_grid_serial>(state); }
void BM_GridStepParallel(benchmark::State& state) { grid_kernel<step_grid>(state); }

void BM_CalibrationSerial(benchmark::State& state) {
  const auto u = CalibrationUncertainty::defaults();
  const CalibMc mc{static_cast<std::size_t>(state.range(0)), 3, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_distribution_serial(59000, u, mc));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CalibrationParallel(benchmark::State& state) {
  const auto u = CalibrationUncertainty::defaults();
  const CalibMc mc{static_cast<std::size_t>(state.range(0)), 3, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_distribution(59000, u, mc));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(4096)->Arg(32000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(4096)->Arg(32000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridStepSerial)->Arg(20)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridStepParallel)->Arg(20)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CalibrationSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrationParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
