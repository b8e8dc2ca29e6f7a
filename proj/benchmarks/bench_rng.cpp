#include <benchmark/benchmark.h>

#include "descent/rng.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  descent::Philox4x32::Block ctr{0, 0, 0, 0};
  const descent::Philox4x32::Key key{0x12345678u, 0x9abcdef0u};
  for (auto _ : state) {
    ctr = descent::Philox4x32::generate(ctr, key);
    benchmark::DoNotOptimize(ctr);
  }
}
BENCHMARK(BM_PhiloxBlock);

void BM_Uniform(benchmark::State& state) {
  descent::RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_Uniform);

void BM_Normal(benchmark::State& state) {
  descent::RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_Normal);

}  // namespace

BENCHMARK_MAIN();
