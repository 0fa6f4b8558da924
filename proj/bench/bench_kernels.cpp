// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "tumorpf/dct.hpp"
#include "tumorpf/model.hpp"
#include "tumorpf/scenario.hpp"
#include "tumorpf/stencil.hpp"
#include "tumorpf/stepper.hpp"

using namespace tumorpf;

namespace {

ScalarField random_field(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

GridSpec grid_for(const benchmark::State& state) {
  return GridSpec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
}

void BM_LaplacianSerial(benchmark::State& state) {
  const auto f = random_field(grid_for(state), 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::laplacian(f));
}

void BM_LaplacianOmp(benchmark::State& state) {
  const auto f = random_field(grid_for(state), 1);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
}

void BM_DegenerateFluxSerial(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto a = random_field(g, 2);
  const auto b = random_field(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(serial::div_degenerate_mobility_grad(a, b, 2.0));
}

void BM_DegenerateFluxOmp(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto a = random_field(g, 2);
  const auto b = random_field(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(div_degenerate_mobility_grad(a, b, 2.0));
}

void BM_DctForward(benchmark::State& state) {
  const auto g = grid_for(state);
  const DctTransform dct(g);
  const auto f = random_field(g, 4);
  for (auto _ : state) benchmark::DoNotOptimize(dct.forward(f));
}

void BM_Etdrk2Step(benchmark::State& state) {
  Scenario sc;
  sc.grid = grid_for(state);
  sc.tumor = sc.grid.dim() == 3 ? TumorInit::two_tumors_3d : TumorInit::gaussian;
  const Prepared prep = prepare(sc);
  const StepOperators ops = make_step_operators(sc.grid, prep.params, sc.step.tau);
  SimState s = prep.state;
  for (auto _ : state) s = etdrk2_step(s, sc.step, ops, prep.params);
}

void Sizes(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128, 256}) b->Args({2, n});
  for (int n : {32, 64}) b->Args({3, n});
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_LaplacianSerial)->Apply(Sizes);
BENCHMARK(BM_LaplacianOmp)->Apply(Sizes);
BENCHMARK(BM_DegenerateFluxSerial)->Apply(Sizes);
BENCHMARK(BM_DegenerateFluxOmp)->Apply(Sizes);
BENCHMARK(BM_DctForward)->Apply(Sizes);
BENCHMARK(BM_Etdrk2Step)->Apply(Sizes);

BENCHMARK_MAIN();
