#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "descent/model.hpp"
#include "descent/quad.hpp"

namespace descent {

enum class StopRule { horizon, all_hits, first_hit };

struct SimOptions {
  StopRule stop = StopRule::all_hits;
  bool record_path = false;
  std::size_t record_stride = 1;
  // Kill or hit with the Brownian-bridge crossing probability between steps.
  bool bridge_correction = false;
  // Each step draws 2^k fine increments, so runs at dt, dt/2, ... share one
  // Brownian path when the same seed and stream are used.
  int noise_refinement = 0;
  int threads = 1;
};

struct PathSample {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double x0 = 0;
  bool from_infinity = false;
  double time_offset = 0;  // added to every reported time
  double dt = 0;
  std::vector<double> times;
  std::vector<double> states;
  std::optional<double> absorbed_at;
  std::vector<std::pair<double, double>> hits;  // (threshold, first passage), ascending thresholds
  double t_end = 0;
  double final_state = 0;

  std::optional<double> hit(double z) const;
};

PathSample simulate_path(const DriftModel& model, double x0, double dt, double t_max,
                         std::uint64_t seed, std::span<const double> thresholds,
                         const SimOptions& options = {}, std::uint64_t stream = 0);

/// Paths from sorted starting points driven by one shared noise stream. The
/// pointwise order is checked after every step.
std::vector<PathSample> simulate_coupled(const DriftModel& model, std::span<const double> x0s,
                                         double dt, double t_max, std::uint64_t seed,
                                         std::span<const double> thresholds = {},
                                         const SimOptions& options = {},
                                         std::uint64_t stream = 0);

struct DescentConfig {
  double delta = 1e-3;  // m(x*) of the start point
  double dt = 1e-4;
  double t_max = 1.0;
  std::size_t n_paths = 1000;
  std::uint64_t base_seed = 1;
};

struct DescentRun {
  double x_star = 0;
  double delta = 0;
  // delta^2 exp(t_max): shape of the pathwise error bound with unknown constants.
  double error_budget = 0;
  std::vector<PathSample> paths;
};

/// Paths approximating the process started at infinity. Each starts at x*
/// with m(x*) = delta and has its clock shifted by delta.
DescentRun simulate_from_infinity(const DriftModel& model, const PotentialTables& tables,
                                  const DescentConfig& cfg, std::span<const double> thresholds,
                                  const SimOptions& options = {});

/// |m(x) - m(y)| with m(infinity) = 0.
double dm_distance(const PotentialTables& tables, double x, double y);

struct Estimate {
  double value = 0;
  double se = 0;
  std::size_t n = 0;
};

/// Fraction of paths from z that reach x before `lower`.
Estimate ruin_probability_mc(const DriftModel& model, double z, double x, double lower,
                             std::size_t n_paths, double dt, std::uint64_t seed,
                             const SimOptions& options = {});

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace descent
