// Serial reference kernels against their OpenMP counterparts. Both produce
// identical statistics; only wall time differs.
#include <benchmark/benchmark.h>

#include "blockade/growth.hpp"
#include "blockade/protocol.hpp"

namespace {

using namespace blockade;

protocol::DetectorModel noisy_detector() {
  protocol::DetectorModel det;
  det.efficiency = 0.3;
  det.dark_count_rate = 2e4;
  return det;
}

void BM_EntangleSerial(benchmark::State& state) {
  const auto det = noisy_detector();
  for (auto _ : state) {
    auto s = protocol::entangle_pair_sampled_serial({0.989}, det, 7, state.range(0));
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EntangleParallel(benchmark::State& state) {
  const auto det = noisy_detector();
  for (auto _ : state) {
    auto s = protocol::entangle_pair_sampled({0.989}, det, 7, state.range(0));
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

growth::GrowthPolicy policy() {
  growth::GrowthPolicy p;
  p.target_size = 12;
  return p;
}

void BM_GrowthSerial(benchmark::State& state) {
  for (auto _ : state) {
    auto s = growth::simulate_growth_serial(policy(), 0.5, 0.5, 11, state.range(0));
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GrowthParallel(benchmark::State& state) {
  for (auto _ : state) {
    auto s = growth::simulate_growth(policy(), 0.5, 0.5, 11, state.range(0));
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_EntangleSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EntangleParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GrowthSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GrowthParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
