#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "descent/errors.hpp"

// Dormand-Prince 5(4) for small linear systems integrated in either
// direction. Every accepted node is kept together with the derivative there,
// so trajectories can be interpolated with cubic Hermite polynomials or
// replayed with the same tableau on a refined node set.
namespace descent::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-300;
  double initial_step = 0.0;  // 0 picks one from the derivative scale
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;
  std::size_t stored_dim = 0;  // leading components kept at each node; 0 keeps all
};

struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> y;   // node-major
  std::vector<double> dy;  // derivative at each node
  std::vector<double> last;  // full state at the final node

  std::size_t size() const noexcept { return x.size(); }
  std::span<const double> state(std::size_t i) const { return {y.data() + i * dim, dim}; }
  std::span<const double> deriv(std::size_t i) const { return {dy.data() + i * dim, dim}; }
  double at(std::size_t i, std::size_t c) const { return y[i * dim + c]; }
  double slope(std::size_t i, std::size_t c) const { return dy[i * dim + c]; }
};

inline double hermite(double x0, double x1, double y0, double y1, double d0, double d1,
                      double x) noexcept {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * d1;
}

inline double hermite_slope(double x0, double x1, double y0, double y1, double d0, double d1,
                            double x) noexcept {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (6 * s - 6 * s2) * y1) / h + (3 * s2 - 4 * s + 1) * d0 +
         (3 * s2 - 2 * s) * d1;
}

namespace detail {

struct Tableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <class F>
class Stepper {
 public:
  Stepper(F& f, std::size_t n) : f_(f), n_(n), k_(7 * n), tmp_(n), y5_(n), err_(n) {}

  // One step from (x, y) with derivative k1 = f(x, y) already in slot 0.
  // Leaves the new state in y5() and its derivative in slot 6.
  void step(double x, std::span<const double> y, double h) {
    using T = Tableau;
    auto k = [&](int s) { return k_.data() + s * n_; };
    const double* k1 = k(0);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * T::a21 * k1[i];
    f_(x + T::c2 * h, tmp_.data(), k(1));
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k(1)[i]);
    f_(x + T::c3 * h, tmp_.data(), k(2));
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k(1)[i] + T::a43 * k(2)[i]);
    f_(x + T::c4 * h, tmp_.data(), k(3));
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k(1)[i] + T::a53 * k(2)[i] +
                            T::a54 * k(3)[i]);
    f_(x + T::c5 * h, tmp_.data(), k(4));
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k(1)[i] + T::a63 * k(2)[i] +
                            T::a64 * k(3)[i] + T::a65 * k(4)[i]);
    f_(x + h, tmp_.data(), k(5));
    for (std::size_t i = 0; i < n_; ++i)
      y5_[i] = y[i] + h * (T::b1 * k1[i] + T::b3 * k(2)[i] + T::b4 * k(3)[i] +
                           T::b5 * k(4)[i] + T::b6 * k(5)[i]);
    f_(x + h, y5_.data(), k(6));
    for (std::size_t i = 0; i < n_; ++i)
      err_[i] = h * (T::e1 * k1[i] + T::e3 * k(2)[i] + T::e4 * k(3)[i] + T::e5 * k(4)[i] +
                     T::e6 * k(5)[i] + T::e7 * k(6)[i]);
  }

  double error_norm(std::span<const double> y, const Options& opt) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5_[i]));
      const double r = err_[i] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(n_));
  }

  double* k1() { return k_.data(); }
  const double* k7() const { return k_.data() + 6 * n_; }
  const std::vector<double>& y5() const { return y5_; }

 private:
  F& f_;
  std::size_t n_;
  std::vector<double> k_, tmp_, y5_, err_;
};

inline void push_node(Trajectory& t, double x, std::span<const double> y, const double* dy) {
  t.x.push_back(x);
  t.y.insert(t.y.end(), y.begin(), y.begin() + static_cast<std::ptrdiff_t>(t.dim));
  t.dy.insert(t.dy.end(), dy, dy + t.dim);
}

}  // namespace detail

/// Adaptive integration of y' = f(x, y) from x0 to x1. Every value in
/// `stops` lying strictly between x0 and x1 becomes a node. The callable has
/// signature void(double x, const double* y, double* dy).
template <class F>
Trajectory integrate(F&& f, double x0, std::span<const double> y0, double x1,
                     const Options& opt, std::span<const double> stops = {}) {
  const std::size_t n = y0.size();
  Trajectory out;
  out.dim = opt.stored_dim == 0 ? n : std::min(n, opt.stored_dim);
  const double dir = x1 >= x0 ? 1.0 : -1.0;

  std::vector<double> targets;
  for (double s : stops)
    if ((s - x0) * dir > 0 && (x1 - s) * dir > 0) targets.push_back(s);
  targets.push_back(x1);
  std::sort(targets.begin(), targets.end(),
            [dir](double a, double b) { return a * dir < b * dir; });
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  detail::Stepper<std::remove_reference_t<F>> st(f, n);
  std::vector<double> y(y0.begin(), y0.end());
  double x = x0;
  f(x, y.data(), st.k1());
  detail::push_node(out, x, y, st.k1());
  if (x0 == x1) {
    out.last = y;
    return out;
  }

  double h = opt.initial_step;
  if (h <= 0) {
    // Derivative scale over the nonzero components only.
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 0.0) continue;
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (st.k1()[i] / sc) * (st.k1()[i] / sc);
    }
    h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-3 * std::abs(x1 - x0) : 0.01 * std::sqrt(d0 / d1);
    h = std::min(h, 0.1 * std::abs(x1 - x0));
  }
  h = std::min(h, opt.max_step);

  std::size_t target_idx = 0;
  std::size_t steps = 0;
  while (target_idx < targets.size()) {
    const double target = targets[target_idx];
    double hs = std::min(h, std::abs(target - x));
    bool hit = hs >= std::abs(target - x) * (1 - 1e-12);
    if (hit) hs = std::abs(target - x);
    if (++steps > opt.max_steps)
      throw StiffnessFailure("ode: step budget exhausted at x=" + std::to_string(x));
    if (hs <= 1e-14 * std::max(1.0, std::abs(x)))
      throw StiffnessFailure("ode: step size underflow at x=" + std::to_string(x));

    st.step(x, y, dir * hs);
    const double err = st.error_norm(y, opt);
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h = hs * fac;
      continue;
    }
    x = hit ? target : x + dir * hs;
    std::copy(st.y5().begin(), st.y5().end(), y.begin());
    std::copy(st.k7(), st.k7() + n, st.k1());
    detail::push_node(out, x, y, st.k1());
    if (hit) ++target_idx;
    const double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h = std::min(opt.max_step, (hit ? std::max(h, hs) : hs) * fac);
  }
  out.last = y;
  return out;
}

/// Fixed-node DP5 sweep over `nodes` (monotone, either direction).
template <class F>
Trajectory replay(F&& f, std::span<const double> nodes, std::span<const double> y0) {
  const std::size_t n = y0.size();
  Trajectory out;
  out.dim = n;
  detail::Stepper<std::remove_reference_t<F>> st(f, n);
  std::vector<double> y(y0.begin(), y0.end());
  f(nodes[0], y.data(), st.k1());
  detail::push_node(out, nodes[0], y, st.k1());
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    st.step(nodes[i - 1], y, nodes[i] - nodes[i - 1]);
    std::copy(st.y5().begin(), st.y5().end(), y.begin());
    std::copy(st.k7(), st.k7() + n, st.k1());
    detail::push_node(out, nodes[i], y, st.k1());
  }
  out.last = y;
  return out;
}

/// Node set with every interval split into `parts` equal pieces.
inline std::vector<double> subdivide(std::span<const double> nodes, int parts) {
  std::vector<double> out;
  out.reserve((nodes.size() - 1) * parts + 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    for (int p = 0; p < parts; ++p)
      out.push_back(nodes[i] + (nodes[i + 1] - nodes[i]) * p / parts);
  out.push_back(nodes.back());
  return out;
}

}  // namespace descent::ode
