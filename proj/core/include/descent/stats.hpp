#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "descent/model.hpp"
#include "descent/quad.hpp"

namespace descent {

enum class Quantity { lln_ratio, clt_ks, fluct_ks, fluct_mean, tail_rate, moment };
const char* to_string(Quantity q) noexcept;

/// One Monte Carlo comparison. pass is recomputable from the stored fields:
/// |estimate - reference| <= se_multiplier * se + tolerance.
struct McReport {
  Quantity quantity = Quantity::moment;
  double estimate = 0;
  double se = 0;
  std::size_t n = 0;
  double reference = 0;
  std::optional<double> ks_stat;
  double tolerance = 0;
  double se_multiplier = 0;
  bool pass = false;
  // echo of the experiment
  double dt = 0;
  std::uint64_t seed = 0;
  double level = 0;  // z or t
  double delta = 0;
  std::string note;

  bool evaluate() const noexcept;
};

struct McOptions {
  double delta = 1e-3;  // descent start level m(x*)
  int threads = 1;
  double ks_threshold = 0.05;
  double se_multiplier = 3.0;
  bool bridge_correction = false;
  int noise_refinement = 0;
};

/// Sorted-sample sup distance between the empirical law and cdf.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
double normal_cdf(double x);

struct SampleSummary {
  double mean = 0;
  double se = 0;
  double var = 0;
  std::size_t n = 0;
};
SampleSummary summarize(std::span<const double> samples);

/// Descent times from infinity to each level, samples[j][i] for level j and path i.
std::vector<std::vector<double>> sample_descent_times(const DriftModel& model,
                                                      const PotentialTables& tables,
                                                      std::span<const double> levels,
                                                      std::size_t n_paths, double dt,
                                                      std::uint64_t seed,
                                                      const McOptions& options = {});

/// Mean hitting-time bias of the protocol: delta plus the discrete-monitoring
/// overshoot 0.5826 sqrt(dt) / q(z).
double protocol_bias(const DriftModel& model, double z, double dt, double delta);

std::vector<McReport> lln_check(const DriftModel& model, const PotentialTables& tables,
                                std::span<const double> z_list, std::size_t n_paths, double dt,
                                std::uint64_t seed, const McOptions& options = {});

/// Standardized samples are stored in `standardized` when it is given.
McReport clt_check(const DriftModel& model, const PotentialTables& tables, double z,
                   std::size_t n_paths, double dt, std::uint64_t seed,
                   const McOptions& options = {}, std::vector<double>* standardized = nullptr);
/// KS statistic of already standardized samples against the standard normal.
McReport clt_report(std::span<const double> standardized, double threshold);

struct FluctuationResult {
  McReport ks;
  McReport mean;  // mean standardized position against 0
  std::vector<double> standardized;
};

/// Positions of the process from infinity at time t, standardized by
/// m^-1(t) and sqrt(t / Sigma). Sigma defaults to sigma_Sigma(tables).
FluctuationResult fluctuation_check(const DriftModel& model, const PotentialTables& tables,
                                    double t, std::size_t n_paths, double dt, std::uint64_t seed,
                                    const McOptions& options = {},
                                    std::optional<double> sigma = std::nullopt);

/// E exp(lambda T_z / m(z)) from infinity against e^lambda; `tolerance` is the
/// absolute slack. The pathwise bound 1 / (1 - lambda) is stored in note.
McReport exp_moment_check(const DriftModel& model, const PotentialTables& tables, double z,
                          double lambda_frac, std::size_t n_paths, double dt, std::uint64_t seed,
                          double tolerance, const McOptions& options = {});

struct TailFit {
  double rate = 0;       // slope of log P against t
  double intercept = 0;  // exp of the fitted log-intercept
  double r2 = 0;
  std::size_t n_used = 0;
};
/// Least squares of log P on t over the trailing `tail_fraction` of the points
/// with P in (0, 1).
TailFit tail_rate_fit(std::span<const std::pair<double, double>> survival,
                      double min_r2 = 0.99, double tail_fraction = 0.5);

/// Fraction of samples above each t.
std::vector<std::pair<double, double>> empirical_survival(std::span<const double> samples,
                                                          std::span<const double> times);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 0;
};
/// Pearson test of bin counts against bin probabilities (renormalized to the
/// count total).
ChiSquare chi_square_test(std::span<const double> counts, std::span<const double> probs);

void write_reports_csv(std::ostream& os, std::span<const McReport> reports,
                       std::span<const std::string> header = {});

}  // namespace descent
