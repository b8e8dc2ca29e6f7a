#include <benchmark/benchmark.h>

#include "descent/quad.hpp"

namespace {

void BM_BuildTables(benchmark::State& state) {
  const auto model = descent::DriftModel::power_law(1, 2);
  descent::TableOptions opt;
  opt.tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto t = descent::build_tables(model, opt);
    benchmark::DoNotOptimize(t.m(0));
  }
}
BENCHMARK(BM_BuildTables)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_MomentTable(benchmark::State& state) {
  const auto tables = descent::build_tables(descent::DriftModel::power_law(1, 2));
  for (auto _ : state) {
    auto mt = descent::build_moments(tables, 1.0, 4);
    benchmark::DoNotOptimize(mt.var());
  }
}
BENCHMARK(BM_MomentTable)->Unit(benchmark::kMillisecond);

void BM_LookupM(benchmark::State& state) {
  const auto tables = descent::build_tables(descent::DriftModel::power_law(1, 2));
  double z = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tables.m(z));
    z = z < 30 ? z + 0.37 : 0.5;
  }
}
BENCHMARK(BM_LookupM);

}  // namespace
