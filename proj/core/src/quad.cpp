#include "descent/quad.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <ostream>

#include "descent/format.hpp"
#include "descent/ode.hpp"

namespace descent {
namespace {

// Two-term large-q approximation of f solving f' = 2 q f - g backward from
// infinity, given g and g' at the same point.
double asymptotic_terminal(double q, double dq, double g, double dg) {
  return g / (2 * q) + dg / (4 * q * q) - g * dq / (4 * q * q * q);
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double double_factorial(int n) {
  double r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

// Raw moments 0..n from cumulants 1..n (kappa[0] unused).
std::vector<double> raw_from_cumulants(const std::vector<double>& kappa, int n) {
  std::vector<double> mu(n + 1, 0.0);
  mu[0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int k = 1; k <= m; ++k) mu[m] += binomial(m - 1, k - 1) * kappa[k] * mu[m - k];
  return mu;
}

std::size_t upper_index(std::span<const double> grid, double x) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - grid.begin())) - 1;
  return std::min(i, grid.size() - 2);
}

enum Slot { kH, kW, kV3, kR4, kIh, kIw, kIv3, kIr4, kSlots };

}  // namespace

double default_x_max(const DriftModel& model) {
  for (int k = 0; k < 400; ++k) {
    const double x = std::ldexp(1.0, 0) * std::pow(2.0, k / 4.0);
    if (model.q(x) >= 1e3) return x;
  }
  throw GridTooSmall("drift never reaches 1e3 on the default ladder");
}

PotentialTables build_tables(const DriftModel& model, const TableOptions& opt) {
  if (!(opt.tol > 0)) throw DomainError("tolerance must be positive");
  if (opt.refine < 1) throw DomainError("refine must be >= 1");
  const double X = opt.x_max > 0 ? opt.x_max : default_x_max(model);
  const auto dX = model.eval(X);
  if (!(dX.q > 1)) throw DomainError("q(x_max) must exceed 1, got " + g17(dX.q));

  const double s1 = model.tail_inverse_power(1, X);
  const double s3 = model.tail_inverse_power(3, X);
  const double s5 = model.tail_inverse_power(5, X);
  const double s7 = model.tail_inverse_power(7, X);
  if (!std::isfinite(s1) || !std::isfinite(s3))
    throw TailUnresolved("integral of 1/q beyond x_max does not converge");

  PotentialTables t(model);
  t.x_max_ = X;
  t.tol_ = opt.tol;
  const double q = dX.q, dq = dX.dq;
  t.m_tail_ = s1 - 1.0 / (4 * q * q);
  t.var_tail_ = s3 - 5.0 / (8 * q * q * q * q);
  t.k3_tail_ = 3 * s5;
  t.k4_tail_ = 15 * s7;

  std::array<double, kSlots> y0{};
  {
    const double h = asymptotic_terminal(q, dq, 1.0, 0.0);
    const double dh = 2 * q * h - 1;
    const double w = asymptotic_terminal(q, dq, h * h, 2 * h * dh);
    const double dw = 2 * q * w - h * h;
    const double v3 = asymptotic_terminal(q, dq, h * w, dh * w + h * dw);
    const double dv3 = 2 * q * v3 - h * w;
    const double r4 = asymptotic_terminal(q, dq, 64 * h * v3 + 16 * w * w,
                                          64 * (dh * v3 + h * dv3) + 32 * w * dw);
    y0 = {h, w, v3, r4, 0, 0, 0, 0};
  }
  auto rhs = [&model](double x, const double* y, double* d) {
    const double qx = model.q(x);
    d[kH] = 2 * qx * y[kH] - 1;
    d[kW] = 2 * qx * y[kW] - y[kH] * y[kH];
    d[kV3] = 2 * qx * y[kV3] - y[kH] * y[kW];
    d[kR4] = 2 * qx * y[kR4] - (64 * y[kH] * y[kV3] + 16 * y[kW] * y[kW]);
    d[kIh] = -y[kH];
    d[kIw] = -y[kW];
    d[kIv3] = -y[kV3];
    d[kIr4] = -y[kR4];
  };
  ode::Options o;
  o.rtol = opt.tol * 0.1;
  o.max_step = X / 64;
  ode::Trajectory traj = ode::integrate(rhs, X, y0, 0.0, o, opt.extra_nodes);
  if (opt.refine > 1) {
    const auto nodes = ode::subdivide(traj.x, opt.refine);
    traj = ode::replay(rhs, nodes, y0);
  }

  const std::size_t n = traj.size();
  auto column = [&](int c, bool derivative) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[n - 1 - i] = derivative ? traj.slope(i, c) : traj.at(i, c);
    return v;
  };
  t.grid_.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.grid_[n - 1 - i] = traj.x[i];
  t.h_ = column(kH, false);
  t.dh_ = column(kH, true);
  t.w_ = column(kW, false);
  t.dw_ = column(kW, true);
  t.v3_ = column(kV3, false);
  t.r4_ = column(kR4, false);
  t.i_h_ = column(kIh, false);
  t.i_w_ = column(kIw, false);
  t.i_v3_ = column(kIv3, false);
  t.i_r4_ = column(kIr4, false);

  t.gamma_.resize(n);
  t.dgamma_.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.dgamma_[i] = 2 * model.q(t.grid_[i]);
  if (model.has_closed_gamma()) {
    for (std::size_t i = 0; i < n; ++i) t.gamma_[i] = model.gamma(t.grid_[i]);
  } else {
    t.gamma_[0] = 0;
    for (std::size_t i = 1; i < n; ++i)
      t.gamma_[i] = t.gamma_[i - 1] +
                    2 * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                            [&model](double s) { return model.q(s); }, t.grid_[i - 1],
                            t.grid_[i], 8, 1e-14);
  }
  t.m_.resize(n);
  t.M_.resize(n);
  t.var_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.m_[i] = 2 * t.i_h_[i] + t.m_tail_;
    t.var_[i] = 8 * t.i_w_[i] + t.var_tail_;
    t.M_[i] = model.tail_inverse_power(1, t.grid_[i]);
  }
  return t;
}

PotentialTables::Node PotentialTables::locate(double x) const {
  if (!(x >= 0) || x > x_max_)
    throw DomainError("x=" + g17(x) + " outside table range [0, " + g17(x_max_) + "]");
  const std::size_t i = upper_index(grid_, x);
  return {i, grid_[i], grid_[i + 1]};
}

double PotentialTables::interp(const std::vector<double>& v, const std::vector<double>& dv,
                               double x) const {
  const auto nd = locate(x);
  if (x == nd.x0) return v[nd.i];
  if (x == nd.x1) return v[nd.i + 1];
  return ode::hermite(nd.x0, nd.x1, v[nd.i], v[nd.i + 1], dv[nd.i], dv[nd.i + 1], x);
}

double PotentialTables::gamma(double x) const {
  if (model_.has_closed_gamma()) {
    if (!(x >= 0) || x > x_max_) locate(x);
    return model_.gamma(x);
  }
  return interp(gamma_, dgamma_, x);
}

double PotentialTables::h(double x) const { return interp(h_, dh_, x); }
double PotentialTables::w(double x) const { return interp(w_, dw_, x); }

double PotentialTables::m(double z) const {
  if (z > x_max_ && std::isfinite(z)) {
    const double q = model_.q(z);
    return model_.tail_inverse_power(1, z) - 1.0 / (4 * q * q);
  }
  if (z == kInfinity) return 0.0;
  const auto nd = locate(z);
  auto at = [&](std::size_t i) { return m_[i]; };
  if (z == nd.x0) return at(nd.i);
  if (z == nd.x1) return at(nd.i + 1);
  return ode::hermite(nd.x0, nd.x1, m_[nd.i], m_[nd.i + 1], -2 * h_[nd.i], -2 * h_[nd.i + 1], z);
}

double PotentialTables::M(double z) const {
  if (!(z >= 0)) throw DomainError("M evaluated at negative z");
  return model_.tail_inverse_power(1, z);
}

double PotentialTables::var(double z) const {
  if (z > x_max_ && std::isfinite(z)) {
    const double q = model_.q(z);
    return model_.tail_inverse_power(3, z) - 5.0 / (8 * q * q * q * q);
  }
  const auto nd = locate(z);
  if (z == nd.x0) return var_[nd.i];
  if (z == nd.x1) return var_[nd.i + 1];
  return ode::hermite(nd.x0, nd.x1, var_[nd.i], var_[nd.i + 1], -8 * w_[nd.i], -8 * w_[nd.i + 1],
                      z);
}

double PotentialTables::cumulant3(double z) const {
  const auto nd = locate(z);
  auto val = [&](std::size_t i) { return 96 * i_v3_[i] + k3_tail_; };
  if (z == nd.x0) return val(nd.i);
  if (z == nd.x1) return val(nd.i + 1);
  return ode::hermite(nd.x0, nd.x1, val(nd.i), val(nd.i + 1), -96 * v3_[nd.i],
                      -96 * v3_[nd.i + 1], z);
}

double PotentialTables::cumulant4(double z) const {
  const auto nd = locate(z);
  auto val = [&](std::size_t i) { return 24 * i_r4_[i] + k4_tail_; };
  if (z == nd.x0) return val(nd.i);
  if (z == nd.x1) return val(nd.i + 1);
  return ode::hermite(nd.x0, nd.x1, val(nd.i), val(nd.i + 1), -24 * r4_[nd.i],
                      -24 * r4_[nd.i + 1], z);
}

double PotentialTables::central4(double z) const {
  const double v = var(z);
  return cumulant4(z) + 3 * v * v;
}

std::vector<double> PotentialTables::tail_cumulants(int n) const {
  std::vector<double> k(n + 1, 0.0);
  for (int j = 1; j <= n; ++j) {
    switch (j) {
      case 1: k[j] = m_tail_; break;
      case 2: k[j] = var_tail_; break;
      case 3: k[j] = k3_tail_; break;
      case 4: k[j] = k4_tail_; break;
      default:
        // Leading order of the local inverse-Gaussian cumulants.
        k[j] = double_factorial(2 * j - 3) * model_.tail_inverse_power(2 * j - 1, x_max_);
    }
  }
  return k;
}

double PotentialTables::max_log_slope_m() const {
  double best = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i) best = std::max(best, std::abs(dh_[i] / h_[i]));
  return best;
}

double lyapunov_m(const PotentialTables& tables, double z) {
  if (!(z >= 0) || z > tables.x_max())
    throw DomainError("lyapunov_m: z outside [0, x_max]");
  return tables.m(z);
}

double deterministic_time_M(const PotentialTables& tables, double z) {
  if (!(z >= 0) || z > tables.x_max())
    throw DomainError("deterministic_time_M: z outside [0, x_max]");
  return tables.M(z);
}

MomentTable build_moments(const PotentialTables& tables, double z, int n_max,
                          std::span<const double> nodes) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  const double X = tables.x_max();
  if (!(z >= 0) || z > X) throw DomainError("moment anchor outside [0, x_max]");
  const DriftModel& model = tables.model();
  const auto dX = model.eval(X);

  MomentTable mt;
  mt.z_ = z;
  mt.x_max_ = X;
  mt.n_max_ = n_max;

  // consts[k] = int_z^X H_k, filled level by level.
  std::vector<double> consts(n_max + 1, 0.0);
  ode::Trajectory traj;
  ode::Options o;
  o.rtol = tables.tol() * 0.1;
  o.max_step = X / 64;

  for (int level = 1; level <= n_max; ++level) {
    const int dim = 2 * level;  // (H_k, I_k) for k = 1..level
    std::vector<double> y0(dim);
    double prev_H = 0;
    for (int k = 1; k <= level; ++k) {
      const double g = k == 1 ? 1.0 : 2.0 * (k - 1) * consts[k - 1];
      const double dg = k == 1 ? 0.0 : 2.0 * (k - 1) * prev_H;
      y0[2 * (k - 1)] = asymptotic_terminal(dX.q, dX.dq, g, dg);
      y0[2 * (k - 1) + 1] = 0;
      prev_H = y0[2 * (k - 1)];
    }
    auto rhs = [&model, &consts, level](double x, const double* y, double* d) {
      const double qx = model.q(x);
      for (int k = 1; k <= level; ++k) {
        const double u_prev = k == 1 ? 1.0 : 2.0 * (k - 1) * (consts[k - 1] - y[2 * (k - 2) + 1]);
        d[2 * (k - 1)] = 2 * qx * y[2 * (k - 1)] - u_prev;
        d[2 * (k - 1) + 1] = -y[2 * (k - 1)];
      }
    };
    if (z == X) {
      traj = ode::Trajectory{};
      traj.dim = dim;
      traj.x = {X};
      traj.y = y0;
      traj.dy.assign(dim, 0.0);
      rhs(X, y0.data(), traj.dy.data());
    } else {
      traj = ode::integrate(rhs, X, y0, z, o, nodes);
    }
    consts[level] = traj.at(traj.size() - 1, 2 * (level - 1) + 1);
  }

  const std::size_t n = traj.size();
  mt.grid_.resize(n);
  for (std::size_t i = 0; i < n; ++i) mt.grid_[n - 1 - i] = traj.x[i];
  mt.u_.assign(n_max, std::vector<double>(n));
  mt.du_.assign(n_max, std::vector<double>(n));
  for (int k = 1; k <= n_max; ++k) {
    const double iz = traj.at(n - 1, 2 * (k - 1) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      mt.u_[k - 1][n - 1 - i] = 2.0 * k * (iz - traj.at(i, 2 * (k - 1) + 1));
      mt.du_[k - 1][n - 1 - i] = 2.0 * k * traj.at(i, 2 * (k - 1));
    }
  }

  // Strong Markov split at x_max: T_z from infinity = T_X from infinity + T_z from X.
  const auto kappa = tables.tail_cumulants(n_max);
  const auto tau = raw_from_cumulants(kappa, n_max);
  mt.inf_.assign(n_max + 1, 0.0);
  mt.inf_[0] = 1;
  for (int k = 1; k <= n_max; ++k) {
    double acc = 0;
    for (int j = 0; j <= k; ++j) {
      const double u_at_X = (k - j == 0) ? 1.0 : mt.u_[k - j - 1][n - 1];
      acc += binomial(k, j) * tau[j] * u_at_X;
    }
    mt.inf_[k] = acc;
  }
  mt.inf_[1] = tables.m(z);
  mt.var_ = tables.var(z);
  mt.central4_ = tables.central4(z);
  return mt;
}

double MomentTable::value(double x, int n) const {
  if (n < 1) throw DomainError("moment order must be >= 1");
  if (n > n_max_) throw DepthExceeded("moment order " + std::to_string(n) + " above n_max");
  if (x == kInfinity) return inf_[n];
  if (!(x >= z_) || x > x_max_) throw DomainError("x outside [z, x_max] and not infinity");
  const std::size_t i = upper_index(grid_, x);
  const auto& u = u_[n - 1];
  const auto& du = du_[n - 1];
  if (x == grid_[i]) return u[i];
  if (x == grid_[i + 1]) return u[i + 1];
  return ode::hermite(grid_[i], grid_[i + 1], u[i], u[i + 1], du[i], du[i + 1], x);
}

double hitting_moment(const MomentTable& table, double x, int n) { return table.value(x, n); }

double hitting_moment(const PotentialTables& tables, double x, double z, int n, int n_max) {
  if (n > n_max) throw DepthExceeded("moment order above n_max");
  if (n == 1) {
    if (!(z >= 0) || z > tables.x_max()) throw DomainError("z outside [0, x_max]");
    if (x == kInfinity) return tables.m(z);
    if (!(x >= z) || x > tables.x_max()) throw DomainError("x outside [z, x_max]");
    return tables.m(z) - tables.m(x);
  }
  const std::array<double, 1> node{x};
  const auto mt = build_moments(tables, z, n_max, x == kInfinity ? std::span<const double>{} : node);
  return mt.value(x, n);
}

double hitting_moment_combinatorial(const MomentTable& at_xi, const MomentTable& at_z, int n) {
  if (n < 1) throw DomainError("moment order must be >= 1");
  if (n > at_xi.n_max() || n > at_z.n_max()) throw DepthExceeded("moment order above n_max");
  if (!(at_z.z_anchor() < at_xi.z_anchor())) throw DomainError("combinatorial form needs z < xi");
  const auto e_xi = at_xi.at_infinity();
  const auto e_z = at_z.at_infinity();

  // Alternating sum over strictly decreasing chains n = l0 > l1 > ... > lk >= 0.
  double total = 0;
  std::vector<int> chain{n};
  auto walk = [&](auto&& self, double weight) -> void {
    const int k = static_cast<int>(chain.size()) - 1;
    const int last = chain.back();
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    total += sign * weight * (e_z[last] - e_xi[last]);
    for (int next = last - 1; next >= 0; --next) {
      chain.push_back(next);
      self(self, weight * binomial(last, next) * e_xi[last - next]);
      chain.pop_back();
    }
  };
  walk(walk, 1.0);
  return total;
}

double hitting_moment_combinatorial(const PotentialTables& tables, double xi, double z, int n) {
  const int depth = std::max(n, 1);
  const auto a = build_moments(tables, xi, depth);
  const auto b = build_moments(tables, z, depth);
  return hitting_moment_combinatorial(a, b, n);
}

double variance(const PotentialTables& tables, double z) {
  if (!(z >= 0) || z > tables.x_max()) throw DomainError("variance: z outside [0, x_max]");
  return tables.var(z);
}

double exp_moment_bound(const PotentialTables& tables, double z, double lambda) {
  const double m = lyapunov_m(tables, z);
  if (!(lambda * m < 1))
    throw BoundInvalid("lambda m(z) = " + g17(lambda * m) + " is not below 1");
  return 1.0 / (1.0 - lambda * m);
}

double green_occupation(const PotentialTables& tables, double x, double z,
                        const std::function<double(double)>& f,
                        std::span<const double> breakpoints) {
  const double X = tables.x_max();
  if (!(z >= 0) || !(x >= z) || x > X) throw DomainError("green_occupation needs 0 <= z <= x <= x_max");
  if (x == z) return 0.0;
  const DriftModel& model = tables.model();
  {
    const double f_hi = f(X), f_mid = f(X / 2);
    if (f_hi > 0 && f_mid > 0 &&
        std::log(f_hi) - tables.gamma(X) / 2 >= std::log(f_mid) - tables.gamma(X / 2) / 2)
      throw TailUnresolved("occupation weight grows like exp(gamma/2) or faster");
  }
  const auto dX = model.eval(X);
  const double eps = 1e-6 * X;
  const double df = (f(X + eps) - f(X - eps)) / (2 * eps);
  const std::array<double, 2> y0{asymptotic_terminal(dX.q, dX.dq, f(X), df), 0.0};
  auto rhs = [&](double s, const double* y, double* d) {
    d[0] = 2 * model.q(s) * y[0] - f(s);
    d[1] = -y[0];
  };
  std::vector<double> stops(breakpoints.begin(), breakpoints.end());
  stops.push_back(x);
  ode::Options o;
  o.rtol = tables.tol() * 0.1;
  o.max_step = X / 64;
  const auto traj = ode::integrate(rhs, X, y0, z, o, stops);
  double at_x = 0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj.x[i] == x) at_x = traj.at(i, 1);
  return 2 * (traj.at(traj.size() - 1, 1) - at_x);
}

CharacteristicValue characteristic_function(const PotentialTables& tables, double x, double z,
                                            double theta, int n_terms) {
  if (n_terms < 1) throw DomainError("n_terms must be >= 1");
  const double m = lyapunov_m(tables, z);
  const double r = std::abs(theta) * m;
  if (!(r < 1)) throw SeriesDiverges("|theta| m(z) = " + g17(r) + " is not below 1");
  CharacteristicValue out{{1.0, 0.0}, std::pow(r, n_terms + 1) / (1 - r)};
  if (theta == 0.0 || x == z) return out;
  const std::array<double, 1> node{x};
  const auto mt =
      build_moments(tables, z, n_terms, x == kInfinity ? std::span<const double>{} : node);
  std::complex<double> term{1.0, 0.0};
  for (int n = 1; n <= n_terms; ++n) {
    term *= std::complex<double>(0.0, theta) / static_cast<double>(n);
    out.value += term * mt.value(x, n);
  }
  return out;
}

double m_inverse(const PotentialTables& tables, double t) {
  const auto grid = tables.grid();
  const auto mv = tables.m_vals();
  if (!(t >= mv.back()) || !(t <= mv.front()))
    throw DomainError("m_inverse: t=" + g17(t) + " outside [m(x_max), m(0)]");
  // m is decreasing along the ascending grid.
  const auto it = std::lower_bound(mv.begin(), mv.end(), t, std::greater<>());
  const std::size_t j = static_cast<std::size_t>(it - mv.begin());
  if (j < mv.size() && mv[j] == t) return grid[j];
  const double lo = grid[j - 1], hi = grid[j];
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      [&](double s) { return tables.m(s) - t; }, lo, hi, mv[j - 1] - t, mv[j] - t,
      boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

double m_inverse_extended(const PotentialTables& tables, double t) {
  if (!(t > 0)) throw DomainError("m_inverse_extended needs t > 0");
  const double mX = tables.m(tables.x_max());
  if (t >= mX) return m_inverse(tables, t);
  double lo = tables.x_max(), hi = 2 * lo;
  while (tables.m(hi) > t) {
    lo = hi;
    hi *= 2;
    if (hi > 1e300) throw DomainError("m_inverse_extended: no bracket");
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      [&](double s) { return tables.m(s) - t; }, lo, hi,
      boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

double sigma_Sigma(const PotentialTables& tables) {
  const DriftModel& model = tables.model();
  const double X = tables.x_max();
  std::array<double, 5> ratio{}, bs{};
  for (int k = 0; k < 5; ++k) {
    const double z = X * std::ldexp(1.0, k - 4);
    const auto d = model.eval(z);
    const double s1 = model.tail_inverse_power_scaled(1, z);
    ratio[k] = s1 / model.tail_inverse_power_scaled(3, z);
    bs[k] = d.dq * s1 / d.q;
  }
  const auto sigma = extrapolate_limit(ratio, 0.01);
  if (!sigma) throw NoLimit("variance ratio does not settle along the table tail");
  if (const auto b = extrapolate_limit(bs, 0.01)) {
    if (std::abs(2 * *b + 1 - *sigma) > 0.01 * *sigma)
      throw NoLimit("2b+1 = " + g17(2 * *b + 1) + " disagrees with " + g17(*sigma));
  }
  return *sigma;
}

TailDiagnostics tail_diagnostics(const PotentialTables& tables, double z) {
  const double q = tables.model().q(z);
  const double h = tables.h(z);
  const double w = tables.w(z);
  return {z, tables.m(z) / tables.M(z) - 1, 2 * q * h - 1, w / (h * h * h) - 1,
          tables.var(z) / tables.model().tail_inverse_power(3, z) - 1};
}

void write_tables_csv(std::ostream& os, const PotentialTables& tables,
                      std::span<const std::string> header) {
  write_header_lines(os, header);
  os << "# model: " << tables.model().describe() << '\n';
  os << "# tol: " << g17(tables.tol()) << '\n';
  os << "z,gamma,h,w,m,M,var\n";
  const auto g = tables.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g17(g[i]) << ',' << g17(tables.gamma_vals()[i]) << ',' << g17(tables.h_vals()[i]) << ','
       << g17(tables.w_vals()[i]) << ',' << g17(tables.m_vals()[i]) << ','
       << g17(tables.M_vals()[i]) << ',' << g17(tables.var_vals()[i]) << '\n';
  }
}

}  // namespace descent
