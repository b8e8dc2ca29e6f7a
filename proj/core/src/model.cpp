#include "descent/model.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "descent/ode.hpp"

namespace descent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gk(auto&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

void require_domain(double x) {
  if (!std::isfinite(x) || x < 0.0)
    throw DomainError("drift evaluated at x=" + std::to_string(x) + ", expected finite x >= 0");
}

}  // namespace

DriftModel DriftModel::power_law(double c, double a, double x_floor) {
  if (!(c > 0.0) || !(a > 1.0) || !(x_floor >= 0.0) || !std::isfinite(x_floor))
    throw DomainError("power law requires c > 0, a > 1, x_floor >= 0");
  DriftModel m;
  m.family_ = Family::power_law;
  m.c_ = c;
  m.a_ = a;
  m.params_ = {c, a};
  m.x_floor_ = x_floor;
  if (a == std::floor(a) && a <= 16) m.int_a_ = static_cast<int>(a);
  if (x_floor > 0) {
    m.floor_q_ = c * std::pow(x_floor, a);
    m.floor_dq_ = c * a * std::pow(x_floor, a - 1);
  }
  return m;
}

DriftModel DriftModel::exp_poly(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  for (double v : coeffs)
    if (!std::isfinite(v)) throw DomainError("exp-poly coefficient is not finite");
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  DriftModel m;
  m.family_ = Family::exp_poly;
  m.params_ = std::move(coeffs);
  return m;
}

DriftModel DriftModel::custom(std::vector<double> xs, std::vector<double> qs) {
  const std::size_t n = xs.size();
  if (n < 2 || qs.size() != n) throw DomainError("custom drift needs at least two (x, q) pairs");
  if (xs[0] != 0.0) throw DomainError("custom drift table must start at x = 0");
  for (std::size_t i = 1; i < n; ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError("custom drift knots must be strictly increasing");
  for (double v : qs)
    if (!std::isfinite(v)) throw DomainError("custom drift value is not finite");

  DriftModel m;
  m.family_ = Family::custom;
  m.knots_ = std::move(xs);
  m.values_ = std::move(qs);
  m.params_ = m.values_;

  // Natural cubic spline second derivatives (Thomas algorithm).
  m.second_.assign(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = m.knots_[i] - m.knots_[i - 1], h1 = m.knots_[i + 1] - m.knots_[i];
      diag[i] = (h0 + h1) / 3.0;
      upper[i] = h1 / 6.0;
      rhs[i] = (m.values_[i + 1] - m.values_[i]) / h1 - (m.values_[i] - m.values_[i - 1]) / h0;
      if (i > 1) {
        const double lower = h0 / 6.0;
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m.second_[i] = (rhs[i] - upper[i] * m.second_[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }
  const double xn = m.knots_.back();
  m.end_q_ = m.values_.back();
  m.end_dq_ = m.spline_slope(xn);
  if (m.end_q_ > 0 && m.end_dq_ > 0 && xn > 0) {
    m.ext_a_ = xn * m.end_dq_ / m.end_q_;
    m.ext_c_ = m.end_q_ / std::pow(xn, m.ext_a_);
  }
  return m;
}

std::string DriftModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::power_law:
      os << "power_law(c=" << c_ << ", a=" << a_ << ", x_floor=" << x_floor_ << ")";
      break;
    case Family::exp_poly:
      os << "exp_poly(";
      for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? ", " : "") << params_[i];
      os << ")";
      break;
    case Family::custom:
      os << "custom(" << knots_.size() << " knots on [0, " << knots_.back() << "])";
      break;
  }
  return os.str();
}

double DriftModel::dpoly(double x) const noexcept {
  double r = 0.0;
  for (std::size_t i = params_.size(); i-- > 1;) r = r * x + static_cast<double>(i) * params_[i];
  return r;
}

double DriftModel::spline_value(double x) const noexcept {
  const double xn = knots_.back();
  if (x >= xn) {
    if (ext_a_ > 0) return ext_c_ * std::pow(x, ext_a_);
    return end_q_ + end_dq_ * (x - xn);
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = std::max<std::ptrdiff_t>(1, it - knots_.begin()) - 1;
  const double h = knots_[i + 1] - knots_[i];
  const double A = (knots_[i + 1] - x) / h, B = 1.0 - A;
  return A * values_[i] + B * values_[i + 1] +
         ((A * A * A - A) * second_[i] + (B * B * B - B) * second_[i + 1]) * h * h / 6.0;
}

double DriftModel::spline_slope(double x) const noexcept {
  const double xn = knots_.back();
  if (x > xn) {
    if (ext_a_ > 0) return ext_c_ * ext_a_ * std::pow(x, ext_a_ - 1);
    return end_dq_;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = std::max<std::ptrdiff_t>(1, it - knots_.begin()) - 1;
  i = std::min(i, knots_.size() - 2);
  const double h = knots_[i + 1] - knots_[i];
  const double A = (knots_[i + 1] - x) / h, B = 1.0 - A;
  return (values_[i + 1] - values_[i]) / h +
         (-(3 * A * A - 1) * second_[i] + (3 * B * B - 1) * second_[i + 1]) * h / 6.0;
}

double DriftModel::spline_integral(double x) const {
  double acc = 0.0;
  const std::size_t n = knots_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (x <= knots_[i]) break;
    const double h = knots_[i + 1] - knots_[i];
    const double T = std::min(1.0, (x - knots_[i]) / h);
    const double A4 = std::pow(1.0 - T, 4);
    acc += h * (values_[i] * (T - T * T / 2) + values_[i + 1] * T * T / 2 +
                h * h / 6.0 *
                    (second_[i] * ((1.0 - A4) / 4 - T + T * T / 2) +
                     second_[i + 1] * (T * T * T * T / 4 - T * T / 2)));
  }
  const double xn = knots_.back();
  if (x > xn) {
    if (ext_a_ > 0)
      acc += ext_c_ * (std::pow(x, ext_a_ + 1) - std::pow(xn, ext_a_ + 1)) / (ext_a_ + 1);
    else
      acc += end_q_ * (x - xn) + end_dq_ * (x - xn) * (x - xn) / 2;
  }
  return acc;
}

double DriftModel::dq(double x) const noexcept {
  switch (family_) {
    case Family::power_law:
      if (x >= x_floor_) return x == 0.0 ? 0.0 : c_ * a_ * pow_a(x) / x;
      return floor_dq_ * x / x_floor_;
    case Family::exp_poly:
      return dpoly(x) * std::exp(poly(x));
    case Family::custom:
      return spline_slope(x);
  }
  return 0.0;
}

DriftValue DriftModel::eval(double x) const {
  require_domain(x);
  return {q(x), dq(x)};
}

bool DriftModel::has_closed_gamma() const noexcept {
  return family_ != Family::exp_poly || params_.size() <= 2;
}

double DriftModel::gamma(double x) const {
  require_domain(x);
  switch (family_) {
    case Family::power_law: {
      const double xf = x_floor_;
      if (xf > 0 && x <= xf)
        return 2.0 * ((floor_q_ - floor_dq_ * xf / 2) * x + floor_dq_ * x * x * x / (6 * xf));
      return 2.0 * c_ * x * pow_a(x) / (a_ + 1) + flattening_correction();
    }
    case Family::exp_poly: {
      if (params_.size() == 1) return 2.0 * std::exp(params_[0]) * x;
      if (params_.size() == 2) {
        const double p1 = params_[1];
        return 2.0 * std::exp(params_[0]) * std::expm1(p1 * x) / p1;
      }
      return 2.0 * gk([this](double y) { return std::exp(poly(y)); }, 0.0, x);
    }
    case Family::custom:
      return 2.0 * spline_integral(x);
  }
  return 0.0;
}

double DriftModel::flattening_correction() const noexcept {
  if (family_ != Family::power_law || x_floor_ <= 0) return 0.0;
  const double xf = x_floor_;
  const double g_floor = 2.0 * ((floor_q_ - floor_dq_ * xf / 2) * xf + floor_dq_ * xf * xf / 6);
  return g_floor - 2.0 * c_ * std::pow(xf, a_ + 1) / (a_ + 1);
}

bool DriftModel::has_closed_tail() const noexcept {
  switch (family_) {
    case Family::power_law:
      return true;
    case Family::exp_poly:
      return params_.size() <= 2;
    case Family::custom:
      return ext_a_ > 0;
  }
  return false;
}

double DriftModel::numeric_tail_scaled(int j, double x) const {
  // q(x)^j * integral over [x, x_end] of q^-j, plus the scaled tail at x_end.
  double x_end = family_ == Family::custom ? knots_.back() : x_floor_;
  const double qx = q(x);
  bool positive = true;
  const double piece = gk(
      [&](double y) {
        const double qy = q(y);
        if (!(qy > 0)) positive = false;
        return std::pow(qx / qy, j);
      },
      x, x_end);
  if (!positive || !std::isfinite(piece)) return kInf;
  return piece + std::pow(qx / q(x_end), j) * tail_inverse_power_scaled(j, x_end);
}

double DriftModel::tail_inverse_power_scaled(int j, double x) const {
  require_domain(x);
  if (j < 1) throw DomainError("tail power must be >= 1");
  const double qx = q(x);
  if (!(qx > 0)) return kInf;
  switch (family_) {
    case Family::power_law:
      if (x >= x_floor_) return x / (j * a_ - 1);
      return numeric_tail_scaled(j, x);
    case Family::exp_poly: {
      const std::size_t deg = params_.size() - 1;
      if (deg == 0 || params_.back() <= 0) return kInf;
      if (deg == 1) return 1.0 / (j * params_[1]);
      const double px = poly(x);
      boost::math::quadrature::exp_sinh<double> es;
      return es.integrate([&](double u) { return std::exp(-j * (poly(x + u) - px)); }, 1e-13);
    }
    case Family::custom: {
      const double xn = knots_.back();
      if (x < xn) return numeric_tail_scaled(j, x);
      if (ext_a_ > 0) return j * ext_a_ > 1 ? x / (j * ext_a_ - 1) : kInf;
      if (j >= 2 && end_dq_ > 0) return qx / (end_dq_ * (j - 1));
      return kInf;
    }
  }
  return kInf;
}

double DriftModel::tail_inverse_power(int j, double x) const {
  require_domain(x);
  if (family_ == Family::power_law && x >= x_floor_) {
    if (x == 0.0) return kInf;
    return std::pow(x, 1 - j * a_) / (std::pow(c_, j) * (j * a_ - 1));
  }
  const double qx = q(x);
  if (!(qx > 0)) return kInf;
  return tail_inverse_power_scaled(j, x) / std::pow(qx, j);
}

DriftValue eval_drift(const DriftModel& model, double x) { return model.eval(x); }

double gamma(const DriftModel& model, double x) { return model.gamma(x); }

double ScaleValue::value() const {
  if (log_value > std::log(std::numeric_limits<double>::max()))
    throw OverflowSignal("scale function overflows; log value is " + std::to_string(log_value));
  return std::exp(log_value);
}

ScaleValue scale_lambda(const DriftModel& model, double x) {
  require_domain(x);
  if (x == 0.0) return {-kInf};
  // g = exp(-gamma(x)) * integral_0^x exp(gamma) solves g' = 1 - 2 q g from g(0) = 0.
  auto rhs = [&model](double s, const double* y, double* dy) { dy[0] = 1.0 - 2.0 * model.q(s) * y[0]; };
  ode::Options opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-300;
  opt.initial_step = std::min(1e-3, x / 16);
  const std::array<double, 1> y0{0.0};
  const auto traj = ode::integrate(rhs, 0.0, y0, x, opt);
  const double g = traj.y.back();
  return {model.gamma(x) + std::log(g)};
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    case Verdict::inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

std::optional<double> extrapolate_limit(std::span<const double> seq, double rel_tol) {
  if (seq.size() < 2) return std::nullopt;
  for (double v : seq)
    if (!std::isfinite(v)) return std::nullopt;
  auto aitken = [&](std::size_t i) {
    const double s0 = seq[i], s1 = seq[i + 1], s2 = seq[i + 2];
    const double d1 = s1 - s0, d2 = s2 - s1;
    const double den = d2 - d1;
    if (std::abs(den) <= 1e-14 * std::max({1.0, std::abs(s2)}) || std::abs(d2) >= std::abs(d1))
      return s2;
    return s2 - d2 * d2 / den;
  };
  const std::size_t n = seq.size();
  double last, prev;
  if (n >= 4) {
    last = aitken(n - 3);
    prev = aitken(n - 4);
  } else {
    last = seq[n - 1];
    prev = seq[n - 2];
  }
  if (std::abs(last - prev) > rel_tol * std::max(1.0, std::abs(last))) return std::nullopt;
  return last;
}

HypothesisReport check_hypotheses(const DriftModel& model, double x_max, double tol) {
  if (!std::isfinite(x_max) || !(x_max > 0))
    throw GridTooSmall("x_max must be positive and finite");
  if (!(tol > 0)) throw DomainError("tolerance must be positive");

  constexpr int kLadder = 7;  // x_max / 64 ... x_max
  std::array<double, kLadder> ladder{};
  for (int k = 0; k < kLadder; ++k) ladder[k] = x_max * std::ldexp(1.0, k - (kLadder - 1));

  std::array<double, kLadder> qv{}, slope{};
  for (int k = 0; k < kLadder; ++k) {
    const auto d = model.eval(ladder[k]);
    if (!std::isfinite(d.q) || !std::isfinite(d.dq))
      throw GridTooSmall("drift is not finite on the tail ladder at x=" + std::to_string(ladder[k]));
    qv[k] = d.q;
    slope[k] = d.q != 0.0 ? d.dq / (d.q * d.q) : kInf;
  }

  HypothesisReport rep;
  const double q_tail = qv.back();

  // H1: integral of h over [0, x_max] plus the 1/(2q) tail bound.
  const double tail_bound = 0.5 * model.tail_inverse_power(1, x_max);
  rep.h1_tail = tail_bound;
  if (!(q_tail > 0) || !std::isfinite(tail_bound)) {
    rep.h1 = Verdict::fail;
    rep.h1_estimate = kInf;
  } else {
    const double qp = model.dq(x_max);
    auto rhs = [&model](double s, const double* y, double* dy) {
      dy[0] = 2.0 * model.q(s) * y[0] - 1.0;
      dy[1] = -y[0];
    };
    ode::Options opt;
    opt.rtol = std::min(1e-8, tol * 1e-3);
    const std::array<double, 2> y0{0.5 / q_tail - qp / (4 * q_tail * q_tail * q_tail), 0.0};
    const auto traj = ode::integrate(rhs, x_max, y0, 0.0, opt, ladder);
    auto cumulative_at = [&](double x) {
      for (std::size_t i = 0; i < traj.size(); ++i)
        if (traj.x[i] == x) return traj.at(i, 1);
      return traj.at(traj.size() - 1, 1);
    };
    const double total = traj.at(traj.size() - 1, 1);
    std::array<double, kLadder> est{};
    for (int k = 0; k < kLadder; ++k)
      est[k] = (total - cumulative_at(ladder[k])) + 0.5 * model.tail_inverse_power(1, ladder[k]);
    rep.h1_estimate = est.back();
    const bool settled = std::abs(est[kLadder - 1] - est[kLadder - 2]) <= tol * est.back() &&
                         std::abs(est[kLadder - 2] - est[kLadder - 3]) <= 10 * tol * est.back();
    rep.h1 = settled ? Verdict::pass : Verdict::inconclusive;
  }

  // H2: q grows and q'/q^2 decays on the last three ladder points.
  rep.h2_q_tail = q_tail;
  rep.h2_slope_tail = slope.back();
  const bool growing = qv[kLadder - 3] < qv[kLadder - 2] && qv[kLadder - 2] < qv[kLadder - 1] &&
                       q_tail > 1.0;
  const bool slope_decays = std::abs(slope[kLadder - 1]) <= std::abs(slope[kLadder - 2]) &&
                            std::abs(slope[kLadder - 2]) <= std::abs(slope[kLadder - 3]);
  if (!growing)
    rep.h2 = Verdict::fail;
  else if (slope_decays && std::abs(slope.back()) <= 10 * tol)
    rep.h2 = Verdict::pass;
  else
    rep.h2 = Verdict::inconclusive;

  // H3: a = min over the last decade of inf_{y >= x} q(y) / q(x).
  {
    constexpr int kSamples = 512;
    std::vector<double> qs(kSamples);
    const double lo = x_max / 10;
    for (int i = 0; i < kSamples; ++i) qs[i] = model.q(lo + (x_max - lo) * i / (kSamples - 1));
    double suffix_min = kInf, a = kInf;
    bool positive = true;
    for (int i = kSamples - 1; i >= 0; --i) {
      if (!(qs[i] > 0)) positive = false;
      suffix_min = std::min(suffix_min, qs[i]);
      if (qs[i] > 0) a = std::min(a, suffix_min / qs[i]);
    }
    rep.h3_a = positive ? std::min(1.0, a) : 0.0;
    rep.h3 = positive ? Verdict::pass : Verdict::fail;
  }

  // Almost-sure LLN integral of 1 / (q^3 M^2) = 1 / (q (qM)^2).
  {
    std::array<double, kLadder - 1> increments{};
    bool finite = true;
    for (int k = 0; k + 1 < kLadder; ++k) {
      increments[k] = gk(
          [&](double y) {
            const double qy = model.q(y);
            const double s = model.tail_inverse_power_scaled(1, y);
            if (!(qy > 0) || !std::isfinite(s)) {
              finite = false;
              return 0.0;
            }
            return 1.0 / (qy * s * s);
          },
          ladder[k], ladder[k + 1]);
    }
    if (!finite) {
      rep.as_lln = Verdict::fail;
      rep.as_lln_integral = kInf;
    } else {
      double sum = 0;
      for (double d : increments) sum += d;
      const double ratio = increments.back() / increments[increments.size() - 2];
      if (ratio >= 1.0) {
        rep.as_lln = Verdict::fail;
        rep.as_lln_integral = kInf;
      } else {
        rep.as_lln_integral = sum + increments.back() * ratio / (1.0 - ratio);
        rep.as_lln = ratio < 0.9 ? Verdict::pass : Verdict::inconclusive;
      }
    }
  }

  // b = lim q'(z) M(z) and the variance-ratio limit, extrapolated along the ladder.
  {
    std::array<double, 5> bs{}, sig{};
    for (int k = 0; k < 5; ++k) {
      const double z = ladder[kLadder - 5 + k];
      const auto d = model.eval(z);
      const double s1 = model.tail_inverse_power_scaled(1, z);
      const double s3 = model.tail_inverse_power_scaled(3, z);
      bs[k] = d.dq * s1 / d.q;
      sig[k] = s1 / s3;
    }
    const double lim_tol = std::max(tol, 1e-6);
    rep.b_limit = extrapolate_limit(bs, lim_tol);
    rep.sigma = extrapolate_limit(sig, lim_tol);
  }
  return rep;
}

}  // namespace descent
