#include <benchmark/benchmark.h>

#include "greenflow/exhaustion.hpp"
#include "greenflow/green.hpp"
#include "greenflow/skeleton.hpp"
#include "greenflow/surfaces.hpp"

using namespace greenflow;

namespace {

const GreenModel& torus() {
  static const GreenModel m = make_model(make_torus({Puncture{ChartPoint{0, {0.0, kPi}}, 1.0}}), Complex{0.0, 0.0});
  return m;
}

Exec policy(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_Laplacian(benchmark::State& state) {
  const Rect w{2.0, 2.5, 1.0, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_residual(torus(), w, 1e-3, 61, policy(state)));
}

void BM_Zeros(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(locate_all_zeros(torus(), 32, {}, std::nullopt, policy(state)));
}

void BM_Basin(benchmark::State& state) {
  const auto zeros = locate_all_zeros(torus(), 32);
  for (auto _ : state) benchmark::DoNotOptimize(basin_sample(torus(), 40, 60.0, zeros, 1, std::nullopt, {}, policy(state)));
}

void BM_Mesh(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_mesh(MeshFamily::Torus, 128, policy(state)));
}

void BM_Exhaustion(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(torus_exhaustion(64, {0.0, kPi}, {1.6, 0.8, 0.4, 0.2, 0.1}, policy(state)));
}

}  // namespace

// Arg 0 is the serial reference, Arg 1 the OpenMP path.
BENCHMARK(BM_Laplacian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Zeros)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Basin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mesh)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Exhaustion)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
