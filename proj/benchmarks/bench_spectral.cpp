#include <benchmark/benchmark.h>

#include "descent/spectral.hpp"

namespace {

void BM_ShootingAngle(benchmark::State& state) {
  const auto tables = descent::build_tables(descent::DriftModel::power_law(1, 2));
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(descent::shooting_angle(tables, 0.0, lambda));
}
BENCHMARK(BM_ShootingAngle)->Arg(1)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SolveSpectrum(benchmark::State& state) {
  const auto tables = descent::build_tables(descent::DriftModel::power_law(1, 2));
  for (auto _ : state) {
    auto s = descent::solve_spectrum(tables, 0.0, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(s.lambda(1));
  }
}
BENCHMARK(BM_SolveSpectrum)->Arg(3)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
