#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "descent/errors.hpp"

namespace descent {

enum class Family { power_law, exp_poly, custom };

struct DriftValue {
  double q;
  double dq;
};

/// Drift q of dX = dB - q(X) dt on [0, inf).
///
/// PowerLaw: q = c x^a, optionally replaced below x_floor by the quadratic
/// q_f + q'_f (x^2 - x_f^2) / (2 x_f) which matches value and slope at x_f.
/// ExpPoly: q = exp(p(x)) with p given by ascending coefficients.
/// Custom: natural cubic spline through a table starting at x = 0. Past the
/// last knot the spline is continued by the power law c x^a matching value
/// and slope, when both are positive, and linearly otherwise.
class DriftModel {
 public:
  static DriftModel power_law(double c, double a, double x_floor = 0.0);
  static DriftModel exp_poly(std::vector<double> coeffs);
  static DriftModel custom(std::vector<double> xs, std::vector<double> qs);

  Family family() const noexcept { return family_; }
  std::span<const double> params() const noexcept { return params_; }
  double x_floor() const noexcept { return x_floor_; }
  std::string describe() const;

  // Hot path, no domain check.
  double q(double x) const noexcept {
    switch (family_) {
      case Family::power_law:
        if (x >= x_floor_) return c_ * pow_a(x);
        return floor_q_ + floor_dq_ * (x * x - x_floor_ * x_floor_) / (2.0 * x_floor_);
      case Family::exp_poly:
        return std::exp(poly(x));
      case Family::custom:
        return spline_value(x);
    }
    return 0.0;
  }
  double dq(double x) const noexcept;
  DriftValue eval(double x) const;

  bool has_closed_gamma() const noexcept;
  /// 2 * integral of q over [0, x].
  double gamma(double x) const;
  /// gamma(x) - 2c x^(a+1)/(a+1) for x >= x_floor; zero without flattening.
  double flattening_correction() const noexcept;

  bool has_closed_tail() const noexcept;
  /// q(x)^j * integral_x^inf q^-j. Infinite when the integral diverges.
  double tail_inverse_power_scaled(int j, double x) const;
  /// integral_x^inf q^-j; may underflow for steep drifts, prefer the scaled form.
  double tail_inverse_power(int j, double x) const;

 private:
  DriftModel() = default;

  double pow_a(double x) const noexcept {
    if (int_a_ > 0) {
      double r = x;
      for (int i = 1; i < int_a_; ++i) r *= x;
      return r;
    }
    return std::pow(x, a_);
  }
  double poly(double x) const noexcept {
    double r = 0.0;
    for (auto it = params_.rbegin(); it != params_.rend(); ++it) r = r * x + *it;
    return r;
  }
  double dpoly(double x) const noexcept;
  double spline_value(double x) const noexcept;
  double spline_slope(double x) const noexcept;
  double spline_integral(double x) const;
  double numeric_tail_scaled(int j, double x) const;

  Family family_ = Family::power_law;
  std::vector<double> params_;
  double x_floor_ = 0.0;
  // power law
  double c_ = 1.0, a_ = 2.0;
  int int_a_ = 0;
  double floor_q_ = 0.0, floor_dq_ = 0.0;
  // custom
  std::vector<double> knots_, values_, second_;
  double ext_c_ = 0.0, ext_a_ = 0.0;  // power continuation when ext_a_ > 0
  double end_q_ = 0.0, end_dq_ = 0.0;
};

DriftValue eval_drift(const DriftModel& model, double x);
double gamma(const DriftModel& model, double x);

struct ScaleValue {
  double log_value;  // -inf at x = 0
  /// Lambda itself; throws OverflowSignal when only the log is representable.
  double value() const;
};

/// Scale function integral_0^x exp(gamma), carried in log form.
ScaleValue scale_lambda(const DriftModel& model, double x);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v) noexcept;

struct HypothesisReport {
  Verdict h1 = Verdict::inconclusive;
  double h1_estimate = 0.0;  // integral_0^inf h, grid part plus tail bound
  double h1_tail = 0.0;

  Verdict h2 = Verdict::inconclusive;
  double h2_q_tail = 0.0;
  double h2_slope_tail = 0.0;  // q'/q^2 at x_max

  Verdict h3 = Verdict::inconclusive;
  double h3_a = 0.0;

  Verdict as_lln = Verdict::inconclusive;
  double as_lln_integral = 0.0;

  std::optional<double> b_limit;
  std::optional<double> sigma;
};

/// Numerical verdicts on the growth conditions of q near infinity,
/// evaluated on a geometric ladder ending at x_max.
HypothesisReport check_hypotheses(const DriftModel& model, double x_max, double tol);

/// Limit of a sequence sampled on a geometric ladder. Uses Aitken's
/// delta-squared on the last three terms. Returns nothing when the last two
/// extrapolants differ by more than rel_tol.
std::optional<double> extrapolate_limit(std::span<const double> seq, double rel_tol);

}  // namespace descent
