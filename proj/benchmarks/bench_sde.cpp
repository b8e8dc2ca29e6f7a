#include <benchmark/benchmark.h>

#include "descent/sde.hpp"

namespace {

// One Euler path of fixed length; items are steps.
void BM_EulerSteps(benchmark::State& state) {
  const auto model = descent::DriftModel::power_law(1, 2);
  const double dt = 1e-5;
  const double t_max = static_cast<double>(state.range(0)) * dt;
  descent::SimOptions opt;
  opt.stop = descent::StopRule::horizon;
  opt.bridge_correction = state.range(1) != 0;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    auto p = descent::simulate_path(model, 1.0, dt, t_max, 7, {}, opt, stream++);
    benchmark::DoNotOptimize(p.final_state);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerSteps)->Args({100000, 0})->Args({100000, 1});

void BM_DescentFromInfinity(benchmark::State& state) {
  const auto model = descent::DriftModel::power_law(1, 2);
  const auto tables = descent::build_tables(model);
  descent::DescentConfig cfg;
  cfg.n_paths = 16;
  cfg.dt = 1e-5;
  const double levels[] = {5.0};
  for (auto _ : state) {
    auto run = descent::simulate_from_infinity(model, tables, cfg, levels);
    benchmark::DoNotOptimize(run.paths.data());
  }
}
BENCHMARK(BM_DescentFromInfinity)->Unit(benchmark::kMillisecond);

}  // namespace
