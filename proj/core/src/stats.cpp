#include "descent/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/chi_squared.hpp>

#include "descent/format.hpp"
#include "descent/sde.hpp"

namespace descent {
namespace {

// Mean and standard deviation of the Kolmogorov law, scaled by sqrt(n).
constexpr double kKsSd = 0.2603;
// Siegmund's constant -zeta(1/2)/sqrt(2 pi) for discretely monitored crossings.
constexpr double kOvershoot = 0.5826;

McReport finish(McReport r) {
  r.pass = r.evaluate();
  return r;
}

}  // namespace

const char* to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::lln_ratio: return "lln_ratio";
    case Quantity::clt_ks: return "clt_ks";
    case Quantity::fluct_ks: return "fluct_ks";
    case Quantity::fluct_mean: return "fluct_mean";
    case Quantity::tail_rate: return "tail_rate";
    case Quantity::moment: return "moment";
  }
  return "?";
}

bool McReport::evaluate() const noexcept {
  return std::abs(estimate - reference) <= se_multiplier * se + tolerance;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 2) throw InsufficientSample("KS needs at least two samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

SampleSummary summarize(std::span<const double> samples) {
  SampleSummary out;
  out.n = samples.size();
  if (out.n == 0) return out;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0;
  for (double v : samples) ss += (v - out.mean) * (v - out.mean);
  out.var = ss / static_cast<double>(out.n - 1);
  out.se = std::sqrt(out.var / static_cast<double>(out.n));
  return out;
}

std::vector<std::vector<double>> sample_descent_times(const DriftModel& model,
                                                      const PotentialTables& tables,
                                                      std::span<const double> levels,
                                                      std::size_t n_paths, double dt,
                                                      std::uint64_t seed,
                                                      const McOptions& options) {
  if (levels.empty()) throw DomainError("no levels requested");
  DescentConfig cfg;
  cfg.delta = options.delta;
  cfg.dt = dt;
  cfg.n_paths = n_paths;
  cfg.base_seed = seed;
  const double lowest = *std::min_element(levels.begin(), levels.end());
  cfg.t_max = 100 * tables.m(lowest) + 1;
  SimOptions sim;
  sim.stop = StopRule::all_hits;
  sim.threads = options.threads;
  sim.bridge_correction = options.bridge_correction;
  sim.noise_refinement = options.noise_refinement;
  const auto run = simulate_from_infinity(model, tables, cfg, levels, sim);
  std::vector<std::vector<double>> out(levels.size(), std::vector<double>(n_paths));
  for (std::size_t i = 0; i < n_paths; ++i)
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const auto t = run.paths[i].hit(levels[j]);
      if (!t) throw Error("path " + std::to_string(i) + " did not reach z=" + g17(levels[j]));
      out[j][i] = *t;
    }
  return out;
}

double protocol_bias(const DriftModel& model, double z, double dt, double delta) {
  return delta + kOvershoot * std::sqrt(dt) / std::max(model.q(z), 1.0);
}

std::vector<McReport> lln_check(const DriftModel& model, const PotentialTables& tables,
                                std::span<const double> z_list, std::size_t n_paths, double dt,
                                std::uint64_t seed, const McOptions& options) {
  const auto samples = sample_descent_times(model, tables, z_list, n_paths, dt, seed, options);
  std::vector<McReport> out;
  for (std::size_t j = 0; j < z_list.size(); ++j) {
    const double m = tables.m(z_list[j]);
    std::vector<double> ratio(samples[j].size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = samples[j][i] / m;
    const auto s = summarize(ratio);
    McReport r;
    r.quantity = Quantity::lln_ratio;
    r.estimate = s.mean;
    r.se = s.se;
    r.n = s.n;
    r.reference = 1.0;
    r.se_multiplier = options.se_multiplier;
    r.tolerance = protocol_bias(model, z_list[j], dt, options.delta) / m;
    r.dt = dt;
    r.seed = seed;
    r.level = z_list[j];
    r.delta = options.delta;
    if (m < 10 * options.delta) r.note = "not asymptotic: m(z) < 10 delta";
    out.push_back(finish(r));
  }
  return out;
}

McReport clt_report(std::span<const double> standardized, double threshold) {
  McReport r;
  r.quantity = Quantity::clt_ks;
  const double ks = ks_statistic(standardized, normal_cdf);
  r.ks_stat = ks;
  r.estimate = ks;
  r.n = standardized.size();
  r.se = kKsSd / std::sqrt(static_cast<double>(r.n));
  r.reference = 0;
  r.tolerance = threshold;
  return finish(r);
}

McReport clt_check(const DriftModel& model, const PotentialTables& tables, double z,
                   std::size_t n_paths, double dt, std::uint64_t seed, const McOptions& options,
                   std::vector<double>* standardized) {
  if (n_paths < 2) throw InsufficientSample("CLT check needs at least two paths");
  const double m = tables.m(z), v = tables.var(z);
  if (!(v > 0)) throw DomainError("variance at z is not positive");
  const double levels[] = {z};
  auto t = sample_descent_times(model, tables, levels, n_paths, dt, seed, options)[0];
  for (double& x : t) x = (x - m) / std::sqrt(v);
  McReport r = clt_report(t, options.ks_threshold);
  if (standardized) *standardized = std::move(t);
  r.dt = dt;
  r.seed = seed;
  r.level = z;
  r.delta = options.delta;
  return r;
}

FluctuationResult fluctuation_check(const DriftModel& model, const PotentialTables& tables,
                                    double t, std::size_t n_paths, double dt, std::uint64_t seed,
                                    const McOptions& options, std::optional<double> sigma) {
  if (n_paths < 2) throw InsufficientSample("fluctuation check needs at least two paths");
  if (options.delta > 0.1 * t)
    throw DeltaTooLarge("delta=" + g17(options.delta) + " is not small against t=" + g17(t));
  const double Sigma = sigma ? *sigma : sigma_Sigma(tables);
  const double center = m_inverse(tables, t);
  const double scale = std::sqrt(t / Sigma);
  DescentConfig cfg;
  cfg.delta = options.delta;
  cfg.dt = dt;
  cfg.t_max = t;
  cfg.n_paths = n_paths;
  cfg.base_seed = seed;
  SimOptions sim;
  sim.stop = StopRule::horizon;
  sim.threads = options.threads;
  sim.bridge_correction = options.bridge_correction;
  sim.noise_refinement = options.noise_refinement;
  const auto run = simulate_from_infinity(model, tables, cfg, {}, sim);

  FluctuationResult out;
  out.standardized.resize(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i)
    out.standardized[i] = (run.paths[i].final_state - center) / scale;
  out.ks = clt_report(out.standardized, options.ks_threshold);
  out.ks.quantity = Quantity::fluct_ks;
  const auto s = summarize(out.standardized);
  McReport mean;
  mean.quantity = Quantity::fluct_mean;
  mean.estimate = s.mean;
  mean.se = s.se;
  mean.n = s.n;
  mean.reference = 0;
  mean.se_multiplier = options.se_multiplier;
  out.mean = finish(mean);
  for (McReport* r : {&out.ks, &out.mean}) {
    r->dt = dt;
    r->seed = seed;
    r->level = t;
    r->delta = options.delta;
    r->note = "Sigma=" + g17(Sigma);
  }
  return out;
}

McReport exp_moment_check(const DriftModel& model, const PotentialTables& tables, double z,
                          double lambda_frac, std::size_t n_paths, double dt, std::uint64_t seed,
                          double tolerance, const McOptions& options) {
  if (!(lambda_frac >= 0) || !(lambda_frac < 1)) throw DomainError("lambda must lie in [0, 1)");
  McReport r;
  r.quantity = Quantity::moment;
  r.reference = std::exp(lambda_frac);
  r.tolerance = tolerance;
  r.dt = dt;
  r.seed = seed;
  r.level = z;
  r.delta = options.delta;
  r.note = "bound=" + g17(1 / (1 - lambda_frac));
  if (lambda_frac == 0) {
    r.estimate = 1;
    return finish(r);
  }
  const double m = tables.m(z);
  const double levels[] = {z};
  auto t = sample_descent_times(model, tables, levels, n_paths, dt, seed, options)[0];
  for (double& x : t) x = std::exp(lambda_frac * x / m);
  const auto s = summarize(t);
  r.estimate = s.mean;
  r.se = s.se;
  r.n = s.n;
  return finish(r);
}

TailFit tail_rate_fit(std::span<const std::pair<double, double>> survival, double min_r2,
                      double tail_fraction) {
  if (!(tail_fraction > 0 && tail_fraction <= 1)) throw DomainError("tail fraction not in (0, 1]");
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, p] : survival)
    if (p > 0 && p < 1) pts.emplace_back(t, std::log(p));
  if (pts.size() < 5) throw InsufficientSample("tail fit needs five points with P in (0, 1)");
  std::sort(pts.begin(), pts.end());
  const auto keep = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(pts.size()) - 1e-9));
  const std::size_t from = pts.size() - std::max<std::size_t>(keep, 2);
  const double n = static_cast<double>(pts.size() - from);
  double mx = 0, my = 0;
  for (std::size_t i = from; i < pts.size(); ++i) mx += pts[i].first, my += pts[i].second;
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = from; i < pts.size(); ++i) {
    const double dx = pts[i].first - mx, dy = pts[i].second - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  TailFit fit;
  fit.n_used = pts.size() - from;
  fit.rate = sxy / sxx;
  fit.intercept = std::exp(my - fit.rate * mx);
  fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  if (!(fit.r2 >= min_r2))
    throw WindowTooNoisy("tail window r^2=" + g17(fit.r2) + " below " + g17(min_r2));
  return fit;
}

std::vector<std::pair<double, double>> empirical_survival(std::span<const double> samples,
                                                          std::span<const double> times) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  std::vector<std::pair<double, double>> out;
  for (double t : times) {
    const auto above = s.end() - std::upper_bound(s.begin(), s.end(), t);
    out.emplace_back(t, static_cast<double>(above) / static_cast<double>(s.size()));
  }
  return out;
}

ChiSquare chi_square_test(std::span<const double> counts, std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    throw DomainError("chi-square needs matching bins, at least two");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(total > 0) || !(mass > 0)) throw InsufficientSample("empty histogram");
  ChiSquare out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = total * probs[i] / mass;
    if (!(e > 0)) throw DomainError("bin with zero expected count");
    out.statistic += (counts[i] - e) * (counts[i] - e) / e;
  }
  out.dof = static_cast<int>(counts.size()) - 1;
  boost::math::chi_squared_distribution<double> dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

void write_reports_csv(std::ostream& os, std::span<const McReport> reports,
                       std::span<const std::string> header) {
  write_header_lines(os, header);
  os << "quantity,estimate,se,n,reference,ks_stat,tolerance,se_multiplier,pass,dt,seed,level,"
        "delta,note\n";
  for (const auto& r : reports) {
    os << to_string(r.quantity) << ',' << g17(r.estimate) << ',' << g17(r.se) << ',' << r.n << ','
       << g17(r.reference) << ',' << (r.ks_stat ? g17(*r.ks_stat) : std::string("NA")) << ','
       << g17(r.tolerance) << ',' << g17(r.se_multiplier) << ',' << (r.pass ? "true" : "false")
       << ',' << g17(r.dt) << ',' << r.seed << ',' << g17(r.level) << ',' << g17(r.delta) << ','
       << r.note << '\n';
  }
}

}  // namespace descent
