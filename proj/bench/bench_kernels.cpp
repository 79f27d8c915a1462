// Serial reference kernels against their OpenMP versions.
// Arg 0 selects the serial kernel, k > 0 runs the parallel one with k workers.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "padexp/kernels.hpp"
#include "padexp/polymap.hpp"

using namespace padexp;

namespace {

const PrimeContext kCtx(3, std::uint64_t{1} << 30);
const PolyMap kMap = parse_polymap("x1^3 + x1*x2^2 + 2*x2; x1^2*x2 + x2^3", 2);

std::vector<unsigned> degrees(const Polynomial& g) {
  std::vector<unsigned> d;
  for (std::size_t j = 0; j < g.variables(); ++j) d.push_back(g.degree_in(j));
  return d;
}

void add_worker_args(benchmark::internal::Benchmark* b) {
  b->Arg(0);
  for (int w = 1; w <= omp_get_max_threads(); w *= 2) b->Arg(w);
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_enumerate_phases(benchmark::State& state) {
  const ModularMap map(kMap, 6, kCtx);
  const std::vector<std::uint64_t> weights{1, 5};
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto acc = workers == 0 ? kernels::enumerate_phases_serial(map, weights)
                            : kernels::enumerate_phases_omp(map, weights, workers);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_enumerate_phases)->Apply(add_worker_args);

void BM_descend(benchmark::State& state) {
  const Modulus mod(3, 9);
  const auto g = kMap[0] + kMap[1] * Rational(4);
  const auto dense = kernels::DenseModPoly::from_polynomial(g, 1, mod, degrees(g));
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = workers == 0 ? kernels::descend_serial(dense) : kernels::descend_omp(dense, workers);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_descend)->Apply(add_worker_args);

void BM_fiber_enumerate(benchmark::State& state) {
  const ModularMap map(kMap, 5, kCtx);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto t = workers == 0 ? kernels::fiber_table_enumerate_serial(map)
                          : kernels::fiber_table_enumerate_omp(map, workers);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_fiber_enumerate)->Apply(add_worker_args);

void BM_fiber_descend(benchmark::State& state) {
  const Modulus mod(3, 5);
  const std::vector<unsigned> d{3, 3};  // dominates both components
  std::vector<kernels::DenseModPoly> comps;
  for (const auto& g : kMap.components()) comps.push_back(kernels::DenseModPoly::from_polynomial(g, 1, mod, d));
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto t = workers == 0 ? kernels::fiber_table_descend_serial(comps)
                          : kernels::fiber_table_descend_omp(comps, workers);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_fiber_descend)->Apply(add_worker_args);

}  // namespace

BENCHMARK_MAIN();
