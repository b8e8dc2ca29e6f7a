#include <atomic>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "descent/sde.hpp"

using namespace descent;

namespace {

const DriftModel& square_model() {
  static const DriftModel m = DriftModel::power_law(1.0, 2.0);
  return m;
}

const PotentialTables& square() {
  static const PotentialTables t = build_tables(square_model());
  return t;
}

SimOptions recording() {
  SimOptions o;
  o.stop = StopRule::horizon;
  o.record_path = true;
  return o;
}

}  // namespace

TEST(Sde, SameSeedSamePath) {
  const double zs[] = {0.5, 1.0};
  const auto a = simulate_path(square_model(), 2.0, 1e-3, 1.0, 42, zs, recording(), 3);
  const auto b = simulate_path(square_model(), 2.0, 1e-3, 1.0, 42, zs, recording(), 3);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.hits, b.hits);
  const auto c = simulate_path(square_model(), 2.0, 1e-3, 1.0, 42, zs, recording(), 4);
  EXPECT_NE(a.states, c.states);
}

TEST(Sde, FinalPartialStep) {
  const auto flat = DriftModel::custom({0, 1}, {0, 0});
  const auto p = simulate_path(flat, 100.0, 0.3, 1.0, 1, {}, recording());
  ASSERT_FALSE(p.absorbed_at);
  EXPECT_DOUBLE_EQ(p.t_end, 1.0);
  EXPECT_DOUBLE_EQ(p.times.back(), 1.0);
  EXPECT_NEAR(p.times[p.times.size() - 2], 0.9, 1e-12);
}

TEST(Sde, AbsorptionIsPermanent) {
  // Zero drift from a point close to 0 is absorbed quickly.
  const auto bm = DriftModel::custom({0, 1}, {0, 0});
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto p = simulate_path(bm, 0.05, 1e-3, 2.0, 9, {}, recording(), s);
    if (!p.absorbed_at) continue;
    EXPECT_EQ(p.final_state, 0.0);
    EXPECT_DOUBLE_EQ(p.t_end, *p.absorbed_at);
    EXPECT_EQ(p.states.back(), 0.0);
    for (std::size_t i = 0; i + 1 < p.states.size(); ++i) EXPECT_GT(p.states[i], 0.0);
  }
}

TEST(Sde, HitsAreAscendingInLevelAndDescendingInTime) {
  const double zs[] = {3.0, 1.0, 2.0};
  SimOptions o;
  o.stop = StopRule::all_hits;
  const auto p = simulate_path(square_model(), 5.0, 1e-4, 10.0, 2, zs, o);
  ASSERT_EQ(p.hits.size(), 3u);
  EXPECT_EQ(p.hits[0].first, 1.0);
  EXPECT_EQ(p.hits[2].first, 3.0);
  EXPECT_GT(*p.hit(1.0), *p.hit(2.0));
  EXPECT_GT(*p.hit(2.0), *p.hit(3.0));
  EXPECT_FALSE(p.hit(4.0));
}

TEST(Sde, StartOnThresholdHitsAtZero) {
  const double zs[] = {2.0};
  const auto p = simulate_path(square_model(), 2.0, 1e-3, 1.0, 1, zs);
  EXPECT_EQ(*p.hit(2.0), 0.0);
}

TEST(Sde, CoupledPathsStayOrdered) {
  const double x0s[] = {0.5, 1.0, 4.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto ps = simulate_coupled(square_model(), x0s, 1e-3, 1.0, 5, {}, recording(), s);
    ASSERT_EQ(ps.size(), 3u);
    for (std::size_t k = 1; k < 3; ++k) {
      const auto n = std::min(ps[k - 1].states.size(), ps[k].states.size());
      for (std::size_t i = 0; i < n; ++i) ASSERT_LE(ps[k - 1].states[i], ps[k].states[i]);
      EXPECT_LE(ps[k - 1].final_state, ps[k].final_state);
    }
  }
}

TEST(Sde, CoupledRejectsUnsortedStarts) {
  const double x0s[] = {2.0, 1.0};
  EXPECT_THROW(simulate_coupled(square_model(), x0s, 1e-3, 1.0, 1), DomainError);
}

TEST(Sde, FromInfinityShiftsClockByDelta) {
  DescentConfig cfg;
  cfg.delta = 1e-2;
  cfg.dt = 1e-4;
  cfg.n_paths = 20;
  const double zs[] = {5.0};
  const auto run = simulate_from_infinity(square_model(), square(), cfg, zs);
  EXPECT_NEAR(square().m(run.x_star), cfg.delta, 1e-10);
  EXPECT_NEAR(run.error_budget, 1e-4 * std::exp(1.0), 1e-15);
  for (const auto& p : run.paths) {
    ASSERT_TRUE(p.hit(5.0));
    EXPECT_GE(*p.hit(5.0), cfg.delta);
    EXPECT_TRUE(p.from_infinity);
  }
}

TEST(Sde, FromInfinityRejectsLargeDelta) {
  DescentConfig cfg;
  cfg.delta = 3.0;
  cfg.t_max = 10;
  EXPECT_THROW(simulate_from_infinity(square_model(), square(), cfg, {}), DeltaTooLarge);
  cfg.delta = 0.1;
  const double above[] = {50.0};
  EXPECT_THROW(simulate_from_infinity(square_model(), square(), cfg, above), DeltaTooLarge);
}

TEST(Sde, ThreadCountDoesNotChangePaths) {
  DescentConfig cfg;
  cfg.n_paths = 64;
  cfg.dt = 1e-4;
  const double zs[] = {1.0, 5.0};
  SimOptions one, two;
  two.threads = 2;
  const auto a = simulate_from_infinity(square_model(), square(), cfg, zs, one);
  const auto b = simulate_from_infinity(square_model(), square(), cfg, zs, two);
  for (std::size_t i = 0; i < a.paths.size(); ++i) EXPECT_EQ(a.paths[i].hits, b.paths[i].hits);
}

TEST(Sde, NoiseRefinementSharesBrownianPath) {
  SimOptions coarse;
  coarse.stop = StopRule::horizon;
  coarse.noise_refinement = 1;
  SimOptions fine;
  fine.stop = StopRule::horizon;
  const auto bm = DriftModel::custom({0, 1}, {0, 0});
  // Without drift the Euler scheme is exact, so both grids end at the same point.
  const auto a = simulate_path(bm, 10.0, 2e-3, 1.0, 3, {}, coarse);
  const auto b = simulate_path(bm, 10.0, 1e-3, 1.0, 3, {}, fine);
  EXPECT_NEAR(a.final_state, b.final_state, 1e-12);
}

TEST(Sde, DmDistance) {
  EXPECT_DOUBLE_EQ(dm_distance(square(), kInfinity, 2.0), square().m(2.0));
  EXPECT_NEAR(dm_distance(square(), 1.0, 2.0), square().m(1.0) - square().m(2.0), 1e-15);
  EXPECT_EQ(dm_distance(square(), kInfinity, kInfinity), 0.0);
}

TEST(Sde, RuinOfBrownianMotion) {
  const auto bm = DriftModel::custom({0, 1}, {0, 0});
  SimOptions o;
  o.bridge_correction = true;
  const auto e = ruin_probability_mc(bm, 1.0, 2.0, 0.0, 4000, 1e-2, 17, o);
  EXPECT_NEAR(e.value, 0.5, 4 * e.se);
  EXPECT_EQ(ruin_probability_mc(bm, 2.0, 2.0, 0.0, 10, 1e-2, 1).value, 1.0);
}

TEST(Sde, ParallelForVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> seen(1000);
  parallel_for(seen.size(), 3, [&](std::size_t i) { seen[i]++; });
  for (const auto& s : seen) EXPECT_EQ(s.load(), 1);
}

TEST(Sde, RejectsBadSteps) {
  EXPECT_THROW(simulate_path(square_model(), 1.0, 0.0, 1.0, 1, {}), DomainError);
  EXPECT_THROW(simulate_path(square_model(), -1.0, 1e-3, 1.0, 1, {}), DomainError);
}
