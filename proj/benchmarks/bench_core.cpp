#include <benchmark/benchmark.h>

#include "upress/leaf.hpp"
#include "upress/potential.hpp"
#include "upress/pressure.hpp"
#include "upress/rng.hpp"

using namespace upress;

namespace {

const SystemSpec& rot() {
  static const SystemSpec sys = SystemSpec::linear_times_rotation(0.33);
  return sys;
}

const SystemSpec& pert() {
  static const SystemSpec sys = SystemSpec::perturbed_times_rotation(0.33, 0.05);
  return sys;
}

void BM_ApplyLinear(benchmark::State& state) {
  TorusPoint x = TorusPoint::wrapped3(0.37, 0.61, 0.12);
  for (auto _ : state) {
    x = apply(rot(), x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_ApplyLinear);

void BM_ApplyPerturbed(benchmark::State& state) {
  TorusPoint x = TorusPoint::wrapped3(0.37, 0.61, 0.12);
  for (auto _ : state) {
    x = apply(pert(), x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_ApplyPerturbed);

void BM_InversePerturbed(benchmark::State& state) {
  SplitMix64 rng(1);
  TorusPoint x = TorusPoint::wrapped3(rng.next_unit(), rng.next_unit(), rng.next_unit());
  for (auto _ : state) {
    x = inverse(pert(), x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_InversePerturbed);

void BM_TraceLeafPerturbed(benchmark::State& state) {
  const TorusPoint base = TorusPoint::wrapped3(0.2, 0.8, 0.5);
  for (auto _ : state) {
    LeafSegment leaf = trace_leaf(pert(), base, 0.2, 1e-3);
    benchmark::DoNotOptimize(leaf.points.data());
  }
}
BENCHMARK(BM_TraceLeafPerturbed);

void BM_SeparatedSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LeafSegment leaf = trace_leaf(rot(), TorusPoint::wrapped3(0, 0, 0), 0.2, 1e-3);
  const Potential zero = Potential::constant(0.0);
  for (auto _ : state) {
    auto result = detail::sweep_separated(rot(), leaf, zero, n, 0.05, 0.0);
    benchmark::DoNotOptimize(result.log_sum);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SeparatedSweep)->DenseRange(6, 12, 2);

void BM_SeparatedSweepGeometric(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LeafSegment leaf = trace_leaf(rot(), TorusPoint::wrapped3(0, 0, 0), 0.2, 1e-3);
  const Potential phi_u = Potential::geometric();
  for (auto _ : state) {
    auto result = detail::sweep_separated(rot(), leaf, phi_u, n, 0.05, 0.0);
    benchmark::DoNotOptimize(result.log_sum);
  }
}
BENCHMARK(BM_SeparatedSweepGeometric)->DenseRange(6, 12, 2);

void BM_EstimatePressure(benchmark::State& state) {
  SeparationParams p;
  p.eps_list = {0.1, 0.05};
  p.n_min = 4;
  p.n_max = static_cast<int>(state.range(0));
  p.offsets = 2;
  p.base_point_count = 2;
  p.seed = 42;
  const Potential zero = Potential::constant(0.0);
  for (auto _ : state) {
    auto est = estimate_pressure(rot(), zero, p);
    benchmark::DoNotOptimize(est.value);
  }
}
BENCHMARK(BM_EstimatePressure)->DenseRange(9, 12, 1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
