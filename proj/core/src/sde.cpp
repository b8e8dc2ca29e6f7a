#include "descent/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "descent/format.hpp"
#include "descent/rng.hpp"

namespace descent {
namespace {

constexpr std::uint64_t kBridgeSalt = 0x9E3779B97F4A7C15ull;
constexpr int kOvershootRun = 10;

// Brownian increments over a step of length h, built from 2^k fine normals.
class Increments {
 public:
  Increments(std::uint64_t seed, std::uint64_t stream, int refinement)
      : rng_(seed, stream), fine_(1 << refinement), scale_(1.0 / std::sqrt(double(fine_))) {}

  double next(double h) noexcept {
    if (fine_ == 1) return std::sqrt(h) * rng_.normal();
    double acc = 0;
    for (int i = 0; i < fine_; ++i) acc += rng_.normal();
    return std::sqrt(h) * scale_ * acc;
  }

 private:
  RandomStream rng_;
  int fine_;
  double scale_;
};

// Lazily drawn uniform shared by every path of a step.
class BridgeDraw {
 public:
  BridgeDraw(std::uint64_t seed, std::uint64_t stream) : rng_(seed ^ kBridgeSalt, stream) {}
  void new_step() noexcept { drawn_ = false; }
  double get() noexcept {
    if (!drawn_) {
      u_ = rng_.uniform();
      drawn_ = true;
    }
    return u_;
  }

 private:
  RandomStream rng_;
  double u_ = 0;
  bool drawn_ = false;
};

class PathState {
 public:
  PathState(PathSample& out, std::span<const double> sorted_thresholds, const SimOptions& opt)
      : out_(out), zs_(sorted_thresholds.begin(), sorted_thresholds.end()), opt_(opt) {
    hit_time_.assign(zs_.size(), -1.0);
    x_ = out.x0;
    for (std::size_t j = 0; j < zs_.size(); ++j)
      if (zs_[j] == x_) mark(j, 0.0);
    if (x_ <= 0) absorb(0.0);
    record(0.0, true);
  }

  bool done() const noexcept {
    if (absorbed_) return true;
    switch (opt_.stop) {
      case StopRule::horizon:
        return false;
      case StopRule::all_hits:
        return !zs_.empty() && n_hit_ == zs_.size();
      case StopRule::first_hit:
        return n_hit_ > 0;
    }
    return false;
  }
  double x() const noexcept { return x_; }

  void step(const DriftModel& model, double t, double h, double dw, BridgeDraw& bridge) {
    const double qx = model.q(x_);
    if (x_ > 0 && qx * h > 0.5 * x_) {
      if (++overshoot_run_ >= kOvershootRun)
        throw StepTooLarge("drift overshoot at x=" + g17(x_) + "; suggested dt <= " +
                           g17(x_ / (4 * qx)));
    } else {
      overshoot_run_ = 0;
    }
    const double xn = x_ - qx * h + dw;
    for (std::size_t j = 0; j < zs_.size(); ++j) {
      if (hit_time_[j] >= 0) continue;
      const double a = x_ - zs_[j], b = xn - zs_[j];
      if (a * b <= 0) {
        mark(j, t + h * a / (a - b));
      } else if (opt_.bridge_correction && std::exp(-2 * a * b / h) > bridge.get()) {
        mark(j, t + 0.5 * h);
      }
    }
    if (xn <= 0) {
      absorb(t + h * x_ / (x_ - xn));
      x_ = 0;
    } else if (opt_.bridge_correction && std::exp(-2 * x_ * xn / h) > bridge.get()) {
      for (std::size_t j = 0; j < zs_.size(); ++j)
        if (hit_time_[j] < 0 && zs_[j] <= std::min(x_, xn)) mark(j, t + 0.5 * h);
      x_ = 0;
      absorb(t + 0.5 * h);
    } else {
      x_ = xn;
    }
    ++steps_;
    record(absorbed_ ? *out_.absorbed_at : t + h, false);
  }

  void finish(double t) {
    if (!absorbed_) record(t, true);
    out_.t_end = absorbed_ ? *out_.absorbed_at : t;
    out_.final_state = x_;
    out_.hits.clear();
    for (std::size_t j = 0; j < zs_.size(); ++j)
      if (hit_time_[j] >= 0) out_.hits.emplace_back(zs_[j], hit_time_[j]);
  }

 private:
  void mark(std::size_t j, double t) {
    hit_time_[j] = t;
    ++n_hit_;
  }
  void absorb(double t) {
    absorbed_ = true;
    out_.absorbed_at = t;
  }
  void record(double t, bool force) {
    if (!opt_.record_path) return;
    if (force || absorbed_ || steps_ % std::max<std::size_t>(1, opt_.record_stride) == 0) {
      if (!out_.times.empty() && out_.times.back() == t) return;
      out_.times.push_back(t);
      out_.states.push_back(x_);
    }
  }

  PathSample& out_;
  std::vector<double> zs_;
  const SimOptions& opt_;
  std::vector<double> hit_time_;
  std::size_t n_hit_ = 0;
  double x_ = 0;
  bool absorbed_ = false;
  int overshoot_run_ = 0;
  std::size_t steps_ = 0;
};

std::vector<double> sorted_thresholds(std::span<const double> thresholds) {
  std::vector<double> zs(thresholds.begin(), thresholds.end());
  for (double z : zs)
    if (!std::isfinite(z) || z < 0) throw DomainError("thresholds must be finite and >= 0");
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  return zs;
}

void check_step(double dt, double t_max) {
  if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(t_max >= 0)) throw DomainError("t_max must be >= 0");
}

}  // namespace

std::optional<double> PathSample::hit(double z) const {
  for (const auto& [level, t] : hits)
    if (level == z) return t;
  return std::nullopt;
}

PathSample simulate_path(const DriftModel& model, double x0, double dt, double t_max,
                         std::uint64_t seed, std::span<const double> thresholds,
                         const SimOptions& options, std::uint64_t stream) {
  if (!std::isfinite(x0) || x0 < 0) throw DomainError("x0 must be finite and >= 0");
  check_step(dt, t_max);
  const auto zs = sorted_thresholds(thresholds);
  PathSample out;
  out.seed = seed;
  out.stream = stream;
  out.x0 = x0;
  out.dt = dt;

  Increments noise(seed, stream, options.noise_refinement);
  BridgeDraw bridge(seed, stream);
  PathState st(out, zs, options);
  double t = 0;
  while (!st.done()) {
    const double h = std::min(dt, t_max - t);
    if (h <= 1e-12 * dt) break;
    bridge.new_step();
    st.step(model, t, h, noise.next(h), bridge);
    t = (h == dt) ? t + dt : t_max;
  }
  st.finish(t);
  return out;
}

std::vector<PathSample> simulate_coupled(const DriftModel& model, std::span<const double> x0s,
                                         double dt, double t_max, std::uint64_t seed,
                                         std::span<const double> thresholds,
                                         const SimOptions& options, std::uint64_t stream) {
  check_step(dt, t_max);
  if (!std::is_sorted(x0s.begin(), x0s.end())) throw DomainError("coupled starts must be sorted");
  const auto zs = sorted_thresholds(thresholds);
  std::vector<PathSample> out(x0s.size());
  std::vector<PathState> states;
  states.reserve(x0s.size());
  for (std::size_t i = 0; i < x0s.size(); ++i) {
    if (!std::isfinite(x0s[i]) || x0s[i] < 0) throw DomainError("x0 must be finite and >= 0");
    out[i].seed = seed;
    out[i].stream = stream;
    out[i].x0 = x0s[i];
    out[i].dt = dt;
    states.emplace_back(out[i], zs, options);
  }
  Increments noise(seed, stream, options.noise_refinement);
  BridgeDraw bridge(seed, stream);
  double t = 0;
  auto all_done = [&] {
    return std::all_of(states.begin(), states.end(), [](const PathState& s) { return s.done(); });
  };
  while (!all_done()) {
    const double h = std::min(dt, t_max - t);
    if (h <= 1e-12 * dt) break;
    const double dw = noise.next(h);
    bridge.new_step();
    for (auto& s : states)
      if (!s.done()) s.step(model, t, h, dw, bridge);
    t = (h == dt) ? t + dt : t_max;
    for (std::size_t i = 1; i < states.size(); ++i)
      if (states[i - 1].x() > states[i].x())
        throw StepTooLarge("coupled paths crossed at t=" + g17(t) + "; reduce dt");
  }
  for (auto& s : states) s.finish(t);
  return out;
}

DescentRun simulate_from_infinity(const DriftModel& model, const PotentialTables& tables,
                                  const DescentConfig& cfg, std::span<const double> thresholds,
                                  const SimOptions& options) {
  if (!(cfg.delta > 0) || !(cfg.dt > 0)) throw DomainError("delta and dt must be positive");
  if (cfg.delta >= tables.m(0.0))
    throw DeltaTooLarge("delta=" + g17(cfg.delta) + " is not below m(0)");
  if (cfg.delta > cfg.t_max) throw DeltaTooLarge("delta exceeds the horizon");
  DescentRun run;
  run.delta = cfg.delta;
  run.x_star = m_inverse_extended(tables, cfg.delta);
  run.error_budget = cfg.delta * cfg.delta * std::exp(cfg.t_max);
  for (double z : thresholds)
    if (z > run.x_star) throw DeltaTooLarge("threshold above the start point x*=" + g17(run.x_star));
  run.paths.resize(cfg.n_paths);
  parallel_for(cfg.n_paths, options.threads, [&](std::size_t i) {
    PathSample p = simulate_path(model, run.x_star, cfg.dt, cfg.t_max - cfg.delta, cfg.base_seed,
                                 thresholds, options, i);
    p.from_infinity = true;
    p.time_offset = cfg.delta;
    p.t_end += cfg.delta;
    for (auto& [z, t] : p.hits) t += cfg.delta;
    if (p.absorbed_at) *p.absorbed_at += cfg.delta;
    for (auto& t : p.times) t += cfg.delta;
    run.paths[i] = std::move(p);
  });
  return run;
}

double dm_distance(const PotentialTables& tables, double x, double y) {
  auto m = [&](double v) {
    if (std::isnan(v) || v < 0) throw DomainError("dm_distance: point must be in [0, inf]");
    return v == kInfinity ? 0.0 : tables.m(v);
  };
  return std::abs(m(x) - m(y));
}

Estimate ruin_probability_mc(const DriftModel& model, double z, double x, double lower,
                             std::size_t n_paths, double dt, std::uint64_t seed,
                             const SimOptions& options) {
  if (!(lower >= 0) || !(z >= lower) || !(x >= z)) throw DomainError("ruin needs 0 <= lower <= z <= x");
  if (n_paths == 0) throw DomainError("n_paths must be positive");
  if (x == z) return {1.0, 0.0, n_paths};
  SimOptions opt = options;
  opt.stop = StopRule::first_hit;
  std::vector<double> levels{x};
  if (lower > 0) levels.push_back(lower);
  std::vector<unsigned char> won(n_paths, 0);
  parallel_for(n_paths, opt.threads, [&](std::size_t i) {
    const auto p = simulate_path(model, z, dt, 1e12, seed, levels, opt, i);
    const auto tx = p.hit(x);
    if (!tx) return;
    const auto tl = lower > 0 ? p.hit(lower) : p.absorbed_at;
    won[i] = !tl || *tx < *tl;
  });
  double k = 0;
  for (auto w : won) k += w;
  const double p = k / double(n_paths);
  return {p, std::sqrt(std::max(p * (1 - p), 1.0 / double(n_paths)) / double(n_paths)), n_paths};
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

}  // namespace descent
