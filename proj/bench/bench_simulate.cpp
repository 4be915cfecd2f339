#include <benchmark/benchmark.h>

#include "tutor/demo_pack.hpp"
#include "tutor/simulate.hpp"

namespace {

tutor::CohortSpec spec_for(const benchmark::State& state) {
  tutor::CohortSpec spec;
  spec.count = static_cast<int>(state.range(0));
  spec.ability = 0.5;
  spec.seed = 3;
  spec.step_cap = 2000;
  return spec;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto pack = tutor::demo_pack();
  const auto rules = tutor::default_policy();
  const auto spec = spec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(tutor::simulate_serial(pack, rules, spec));
  state.SetItemsProcessed(state.iterations() * spec.count);
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto pack = tutor::demo_pack();
  const auto rules = tutor::default_policy();
  const auto spec = spec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(tutor::simulate_parallel(pack, rules, spec));
  state.SetItemsProcessed(state.iterations() * spec.count);
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SimulateParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
