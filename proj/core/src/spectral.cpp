#include "descent/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "descent/format.hpp"
#include "descent/ode.hpp"

namespace descent {
namespace {

constexpr double kPi = std::numbers::pi;
// gamma(x_max) - gamma(z) below this leaves mass of mu_z past x_max.
constexpr double kMinPotentialDrop = 50.0;

double resolve_x_max(const PotentialTables& tables, double x_max) {
  if (x_max <= 0) return tables.x_max();
  if (x_max > tables.x_max())
    throw DomainError("spectrum x_max=" + g17(x_max) + " exceeds table end " +
                      g17(tables.x_max()));
  return x_max;
}

// log psi(x_max) - log psi(x) expressed through the cumulants of T_x from
// infinity; returns the sum and the size of its last two terms.
struct TailGrowth {
  double log_ratio;
  double high_order;
};

TailGrowth tail_growth(double lambda, double m, double var, double k3, double k4) {
  const double l2 = lambda * lambda;
  const double hi = std::abs(l2 * lambda * k3 / 6) + std::abs(l2 * l2 * k4 / 24);
  return {lambda * m + l2 * var / 2 + l2 * lambda * k3 / 6 + l2 * l2 * k4 / 24, hi};
}

// Cumulants of T_x from infinity at points past the table, leading order.
TailGrowth tail_growth_beyond(const PotentialTables& t, double lambda, double x) {
  const auto& model = t.model();
  return tail_growth(lambda, t.m(x), t.var(x), 3 * model.tail_inverse_power(5, x),
                     15 * model.tail_inverse_power(7, x));
}

// Starting angle at x_max from psi'/psi = 2 lambda h + 4 lambda^2 w.
double start_angle(const PotentialTables& t, double x_max, double lambda) {
  const double k = std::sqrt(2 * lambda);
  const double s = 2 * lambda * t.h(x_max) + 4 * lambda * lambda * t.w(x_max);
  return std::atan2(k, s);
}

ode::Options sweep_options(double rtol, double span) {
  ode::Options o;
  o.rtol = rtol;
  o.atol = 1e-13;
  o.max_step = span / 32;
  return o;
}

std::size_t grid_index(std::span<const double> grid, double x) {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (i == 0) i = 1;
  if (i >= grid.size()) i = grid.size() - 1;
  return i - 1;
}

int sign_changes(std::span<const double> v, std::size_t from) {
  int n = 0;
  double prev = 0;
  for (std::size_t i = from; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (prev != 0 && (v[i] > 0) != (prev > 0)) ++n;
    prev = v[i];
  }
  return n;
}

// Estimated size of the terms past K of sum_k exp(-lambda_k t) c_k with
// |c_k| <= prefactor * sup_k^power, using the envelope
// log sup_k <= C + eps lambda_k fitted over the computed pairs and a linear
// continuation of the eigenvalues.
double series_tail(const Spectrum& s, double t, int power, double prefactor) {
  const int K = s.size();
  std::vector<double> lam(K), ls(K);
  for (int k = 1; k <= K; ++k) {
    lam[k - 1] = s.lambda(k);
    ls[k - 1] = std::log(s.pair(k).sup_norm);
  }
  double eps = 0;
  const int from = K / 2;
  if (K - from >= 2) {
    double mx = 0, my = 0;
    for (int i = from; i < K; ++i) mx += lam[i], my += ls[i];
    mx /= K - from;
    my /= K - from;
    double sxy = 0, sxx = 0;
    for (int i = from; i < K; ++i) {
      sxy += (lam[i] - mx) * (ls[i] - my);
      sxx += (lam[i] - mx) * (lam[i] - mx);
    }
    eps = std::max(0.0, sxx > 0 ? sxy / sxx : 0.0);
  }
  double c = -kInfinity;
  for (int i = 0; i < K; ++i) c = std::max(c, ls[i] - eps * lam[i]);
  const double d = K >= 2 ? lam[K - 1] - lam[K - 2] : lam[0];
  const double rate = power * eps - t;
  if (rate >= 0) return kInfinity;
  const double first = prefactor * std::exp(power * c + rate * (lam[K - 1] + d));
  return first / (1 - std::exp(rate * d));
}

}  // namespace

double shooting_angle(const PotentialTables& tables, double z, double lambda, double x_max,
                      double rtol) {
  const double X = resolve_x_max(tables, x_max);
  if (!(z >= 0) || z >= X) throw DomainError("killing level z=" + g17(z) + " outside [0, x_max)");
  if (!(lambda > 0)) throw DomainError("lambda must be positive");
  const auto& model = tables.model();
  const double k = std::sqrt(2 * lambda);
  auto f = [&](double x, const double* y, double* dy) { dy[0] = k - model.q(x) * std::sin(2 * y[0]); };
  const double y0 = start_angle(tables, X, lambda);
  auto opt = sweep_options(rtol, X - z);
  opt.stored_dim = 1;
  const auto tr = ode::integrate(f, X, std::span<const double>(&y0, 1), z, opt);
  return tr.last[0];
}

Spectrum solve_spectrum(const PotentialTables& tables, double z, int K,
                        const SpectrumOptions& options) {
  if (K < 1) throw DomainError("K must be >= 1");
  const double X = resolve_x_max(tables, options.x_max);
  if (!(z >= 0) || z >= X) throw DomainError("killing level z=" + g17(z) + " outside [0, x_max)");
  const double drop = tables.gamma(X) - tables.gamma(z);
  if (drop < kMinPotentialDrop)
    throw GridTooSmall("gamma(x_max) - gamma(z) = " + g17(drop) + " leaves mass past x_max");
  const auto& model = tables.model();

  // Eigenvalues one at a time: pair k has theta(z) = -(k-1) pi.
  std::vector<double> lambdas;
  auto angle = [&](double lam) { return shooting_angle(tables, z, lam, X, options.rtol); };
  auto close_enough = [&](double a, double b) {
    return std::abs(a - b) <= options.lambda_rtol * std::max(std::abs(a), std::abs(b));
  };
  for (int k = 1; k <= K; ++k) {
    const double target = -(k - 1) * kPi;
    auto F = [&](double lam) { return angle(lam) - target; };
    double lo, hi;
    if (k == 1) {
      lo = 1e-8 / tables.m(z);
      const double qz = std::max(0.0, model.q(z));
      hi = std::max(2.0 / tables.m(z), qz * qz);
    } else {
      lo = lambdas.back();
      const double gap = k >= 3 ? lambdas[k - 2] - lambdas[k - 3] : lambdas[0];
      hi = lo + 2 * gap;
    }
    double flo = F(lo), fhi = F(hi);
    if (!(flo > 0)) throw EigenNotSeparated("no sign change below eigenvalue " + std::to_string(k));
    for (int it = 0; fhi > 0; ++it) {
      if (it > 60) throw EigenNotSeparated("no upper bracket for eigenvalue " + std::to_string(k));
      lo = hi;
      flo = fhi;
      hi = lo + 2 * (hi - (k == 1 ? 0.0 : lambdas.back()));
      fhi = F(hi);
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi, close_enough, iters);
    const double lam = 0.5 * (a + b);
    if (!lambdas.empty() && lam <= lambdas.back() * (1 + 1e-10))
      throw EigenNotSeparated("eigenvalues " + std::to_string(k - 1) + " and " +
                              std::to_string(k) + " collapsed at " + g17(lam));
    lambdas.push_back(lam);
    if (options.lambda_cap > 0 && lam > options.lambda_cap) break;
  }
  const int n = static_cast<int>(lambdas.size());

  // Joint sweep: angles, log-amplitudes, int psi dmu and the Gram matrix.
  std::vector<double> kk(n);
  for (int i = 0; i < n; ++i) kk[i] = std::sqrt(2 * lambdas[i]);
  const std::size_t n_gram = static_cast<std::size_t>(n) * (n + 1) / 2;
  const std::size_t dim = 3 * static_cast<std::size_t>(n) + n_gram;
  const double gz = tables.gamma(z);
  std::vector<double> psi_buf(n);
  auto f = [&](double x, const double* y, double* dy) {
    const double q = model.q(x);
    const double wgt = 2 * std::exp(-(tables.gamma(x) - gz));
    for (int i = 0; i < n; ++i) {
      const double th = y[2 * i];
      const double s = std::sin(th), c = std::cos(th);
      dy[2 * i] = kk[i] - 2 * q * s * c;
      dy[2 * i + 1] = 2 * q * c * c;
      psi_buf[i] = std::exp(y[2 * i + 1]) * s;
    }
    double* di = dy + 2 * n;
    for (int i = 0; i < n; ++i) di[i] = -wgt * psi_buf[i];
    double* dg = dy + 3 * n;
    for (int i = 0, p = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++p) dg[p] = -wgt * psi_buf[i] * psi_buf[j];
  };
  std::vector<double> y0(dim, 0.0);
  for (int i = 0; i < n; ++i) y0[2 * i] = start_angle(tables, X, lambdas[i]);
  auto opt = sweep_options(options.rtol, X - z);
  opt.stored_dim = 2 * static_cast<std::size_t>(n);
  const auto tr = ode::integrate(f, X, y0, z, opt);

  // Mass of mu_z past x_max, to leading order in 1/q.
  const double tail_mass = 2 * std::exp(-drop) * tables.h(X);
  const auto& last = tr.last;
  std::vector<double> norm(n), integral(n), psi_x(n);
  for (int i = 0; i < n; ++i) psi_x[i] = std::sin(y0[2 * i]);
  for (int i = 0, p = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++p)
      if (i == j) norm[i] = last[3 * n + p] + tail_mass * psi_x[i] * psi_x[i];
  for (int i = 0; i < n; ++i) integral[i] = last[2 * n + i] + tail_mass * psi_x[i];

  Spectrum s;
  s.tables_ = std::make_shared<const PotentialTables>(tables);
  s.z_ = z;
  s.x_max_ = X;
  s.gamma_z_ = gz;
  s.mu_total_ = 2 * tables.h(z);
  const std::size_t nodes = tr.size();
  s.grid_.resize(nodes);
  for (std::size_t r = 0; r < nodes; ++r) s.grid_[r] = tr.x[nodes - 1 - r];
  s.grid_.front() = z;

  s.mu_weights_.assign(nodes, 0.0);
  for (std::size_t r = 0; r + 1 < nodes; ++r) {
    const double hw = 0.5 * (s.grid_[r + 1] - s.grid_[r]);
    s.mu_weights_[r] += hw * 2 * std::exp(-(tables.gamma(s.grid_[r]) - gz));
    s.mu_weights_[r + 1] += hw * 2 * std::exp(-(tables.gamma(s.grid_[r + 1]) - gz));
  }

  s.gram_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0, p = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++p) {
      const double g = (last[3 * n + p] + tail_mass * psi_x[i] * psi_x[j]) /
                       std::sqrt(norm[i] * norm[j]);
      s.gram_[i * n + j] = g;
      s.gram_[j * n + i] = g;
    }

  const double mX = tables.m(X), vX = tables.var(X);
  const double k3X = tables.cumulant3(X), k4X = tables.cumulant4(X);
  s.pairs_.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& pr = s.pairs_[i];
    pr.index = i + 1;
    pr.lambda = lambdas[i];
    const double scale = 1 / std::sqrt(norm[i]);
    pr.psi.resize(nodes);
    pr.dpsi.resize(nodes);
    for (std::size_t r = 0; r < nodes; ++r) {
      const auto st = tr.state(nodes - 1 - r);
      const double amp = std::exp(st[2 * i + 1]) * scale;
      pr.psi[r] = amp * std::sin(st[2 * i]);
      pr.dpsi[r] = kk[i] * amp * std::cos(st[2 * i]);
    }
    pr.psi.front() = 0.0;
    const auto g = tail_growth(lambdas[i], mX, vX, k3X, k4X);
    if (g.high_order > 1e-3 || lambdas[i] > 0.25 * model.q(X) * model.q(X))
      throw TailNotPlateaued("eigenvalue " + std::to_string(i + 1) + " = " + g17(lambdas[i]) +
                             " is not resolved by the tail expansion at x_max=" + g17(X));
    pr.psi_inf = pr.psi.back() * std::exp(g.log_ratio);
    pr.mu_integral = integral[i] * scale;
    double sup = std::abs(pr.psi_inf);
    for (double v : pr.psi) sup = std::max(sup, std::abs(v));
    pr.sup_norm = sup;
    pr.zero_count = 1 + sign_changes(pr.psi, 1);
    pr.slope_zero_count = sign_changes(pr.dpsi, 0);
    double res = 0;
    for (int j = 0; j < n; ++j) res = std::max(res, std::abs(s.gram_[i * n + j] - (i == j ? 1 : 0)));
    pr.norm_residual = res;
  }
  return s;
}

Spectrum solve_spectrum_for_time(const PotentialTables& tables, double z, double t, int k_max,
                                 const SpectrumOptions& options) {
  if (!(t > 0)) throw DomainError("t must be positive");
  for (int K = std::min(8, k_max);; K = std::min(2 * K, k_max)) {
    Spectrum s = solve_spectrum(tables, z, K, options);
    const auto& last = s.pair(s.size());
    if (std::exp(-last.lambda * t) * last.sup_norm * last.sup_norm < 1e-8 || K == k_max) return s;
  }
}

double Spectrum::psi(int k, double x) const {
  const auto& pr = pair(k);
  if (std::isnan(x) || x < z_) throw DomainError("psi evaluated below the killing level");
  if (x == kInfinity) return pr.psi_inf;
  if (x > x_max_)
    return pr.psi_inf * std::exp(-tail_growth_beyond(*tables_, pr.lambda, x).log_ratio);
  const std::size_t i = grid_index(grid_, x);
  return ode::hermite(grid_[i], grid_[i + 1], pr.psi[i], pr.psi[i + 1], pr.dpsi[i], pr.dpsi[i + 1],
                      x);
}

double Spectrum::dpsi(int k, double x) const {
  const auto& pr = pair(k);
  if (std::isnan(x) || x < z_) throw DomainError("psi' evaluated below the killing level");
  if (x == kInfinity) return 0.0;
  if (x > x_max_) {
    const double q = tables_->model().q(x);
    return psi(k, x) * (pr.lambda / q + pr.lambda * pr.lambda / (2 * q * q * q));
  }
  const std::size_t i = grid_index(grid_, x);
  return ode::hermite_slope(grid_[i], grid_[i + 1], pr.psi[i], pr.psi[i + 1], pr.dpsi[i],
                            pr.dpsi[i + 1], x);
}

double eigen_integral_residual(const Spectrum& s, int k, int stride) {
  if (stride < 1) throw DomainError("stride must be >= 1");
  const auto& pr = s.pair(k);
  const auto grid = s.grid();
  const auto& model = s.tables().model();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < grid.size(); i += static_cast<std::size_t>(stride)) idx.push_back(i);
  if (idx.back() != grid.size() - 1) idx.push_back(grid.size() - 1);

  // Radau IIA, three stages, order five.
  const double r6 = std::sqrt(6.0);
  const std::array<double, 3> c{(4 - r6) / 10, (4 + r6) / 10, 1.0};
  const double A[3][3] = {{(88 - 7 * r6) / 360, (296 - 169 * r6) / 1800, (-2 + 3 * r6) / 225},
                          {(296 + 169 * r6) / 1800, (88 + 7 * r6) / 360, (-2 - 3 * r6) / 225},
                          {(16 - r6) / 36, (16 + r6) / 36, 1.0 / 9}};

  // phi = e^gamma int_x^inf e^-gamma psi solves phi' = 2 q phi - psi, backward
  // from x_max; Phi(x) = int_x^{x_max} phi.
  const double X = grid.back();
  const auto dv = model.eval(X);
  const double psiX = pr.psi.back(), dpsiX = pr.dpsi.back();
  double phi = psiX / (2 * dv.q) + dpsiX / (4 * dv.q * dv.q) - psiX * dv.dq / (4 * dv.q * dv.q * dv.q);
  double Phi = 0;
  std::vector<double> Phi_at(idx.size());
  Phi_at.back() = 0;
  for (std::size_t n = idx.size() - 1; n > 0; --n) {
    const double x0 = grid[idx[n]], h = grid[idx[n - 1]] - x0;
    double M[3][3], rhs[3], q[3], ps[3];
    for (int i = 0; i < 3; ++i) {
      const double xi = x0 + c[i] * h;
      q[i] = model.q(xi);
      ps[i] = s.psi(k, std::max(xi, s.z()));
    }
    // Y_i - h sum_j a_ij 2 q_j Y_j = phi - h sum_j a_ij psi_j
    for (int i = 0; i < 3; ++i) {
      rhs[i] = phi;
      for (int j = 0; j < 3; ++j) {
        M[i][j] = (i == j ? 1.0 : 0.0) - h * A[i][j] * 2 * q[j];
        rhs[i] -= h * A[i][j] * ps[j];
      }
    }
    // Gaussian elimination with partial pivoting.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
      int best = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(M[perm[r]][col]) > std::abs(M[perm[best]][col])) best = r;
      std::swap(perm[col], perm[best]);
      for (int r = col + 1; r < 3; ++r) {
        const double f = M[perm[r]][col] / M[perm[col]][col];
        for (int cc = col; cc < 3; ++cc) M[perm[r]][cc] -= f * M[perm[col]][cc];
        rhs[perm[r]] -= f * rhs[perm[col]];
      }
    }
    double Y[3];
    for (int col = 2; col >= 0; --col) {
      double acc = rhs[perm[col]];
      for (int cc = col + 1; cc < 3; ++cc) acc -= M[perm[col]][cc] * Y[cc];
      Y[col] = acc / M[perm[col]][col];
    }
    // Phi' = -phi integrated with the same collocation.
    double dPhi = 0;
    for (int j = 0; j < 3; ++j) dPhi += A[2][j] * (-Y[j]);
    Phi += h * dPhi;
    phi = Y[2];
    Phi_at[n - 1] = Phi;
  }
  const double total = Phi_at.front();
  double worst = 0;
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const double integral = total - Phi_at[n];  // int_z^x phi
    worst = std::max(worst, std::abs(pr.psi[idx[n]] - 2 * pr.lambda * integral));
  }
  return worst;
}

double QsdDensity::operator()(double x) const {
  const auto& s = *s_;
  if (std::isnan(x)) throw DomainError("density evaluated at NaN");
  if (x <= s.z() || x > s.x_max()) return 0.0;
  const auto& pr = s.pair(1);
  const double g = s.tables().gamma(x) - s.tables().gamma(s.z());
  return 2 * s.psi(1, x) * std::exp(-g) / pr.mu_integral;
}

QsdDensity qsd_density(const Spectrum& spectrum) { return QsdDensity(spectrum); }

SeriesValue survival_probability(const Spectrum& s, double t, double y) {
  if (!(t > 0)) throw DomainError("survival needs t > 0");
  if (std::isnan(y) || y < s.z()) throw DomainError("start below the killing level");
  SeriesValue out;
  if (y == s.z()) return out;
  double sum = 0;
  for (int k = 1; k <= s.size(); ++k)
    sum += std::exp(-s.lambda(k) * t) * s.psi(k, y) * s.pair(k).mu_integral;
  // |int psi_k dmu| <= sqrt(mu_z total) by Cauchy-Schwarz.
  out.truncation = series_tail(s, t, 1, std::sqrt(s.mu_total()));
  if (!(out.truncation <= 0.1 * std::abs(sum)))
    throw TruncationDominates("survival at t=" + g17(t) + ": tail estimate " +
                              g17(out.truncation) + " vs value " + g17(sum) +
                              "; raise K or t");
  out.negative = sum < -out.truncation;
  out.value = std::clamp(sum, 0.0, 1.0);
  out.clipped = std::abs(sum - out.value);
  return out;
}

SeriesValue transition_density(const Spectrum& s, double t, double y, double x) {
  if (!(t > 0)) throw DomainError("density needs t > 0");
  if (std::isnan(y) || y < s.z() || std::isnan(x) || x < s.z())
    throw DomainError("points below the killing level");
  double sum = 0;
  for (int k = 1; k <= s.size(); ++k)
    sum += std::exp(-s.lambda(k) * t) * s.psi(k, y) * s.psi(k, x);
  SeriesValue out;
  out.truncation = series_tail(s, t, 2, 1.0);
  // Compared against the size of the leading term along the row.
  const double scale = std::exp(-s.lambda(1) * t) * std::abs(s.pair(1).psi_inf) * s.pair(1).sup_norm;
  if (!(out.truncation <= 0.1 * std::max(std::abs(sum), scale)))
    throw TruncationDominates("density at t=" + g17(t) + ": tail estimate " +
                              g17(out.truncation) + " vs scale " + g17(scale) +
                              "; raise K or t");
  out.negative = sum < -out.truncation;
  out.value = std::max(sum, 0.0);
  out.clipped = out.value - sum;
  return out;
}

double yaglom_constant(const Spectrum& s, double y) {
  return s.psi(1, y) * s.pair(1).mu_integral;
}

std::vector<std::pair<double, double>> ratio_uniformity(const Spectrum& s,
                                                        std::span<const double> starts, double t) {
  if (!(t > 0)) throw DomainError("ratio needs t > 0");
  const int K = s.size();
  const double trunc = series_tail(s, t, 2, 1.0);
  std::vector<double> c_inf(K);
  for (int k = 1; k <= K; ++k) c_inf[k - 1] = std::exp(-s.lambda(k) * t) * s.pair(k).psi_inf;
  const auto grid = s.grid();
  std::vector<std::pair<double, double>> out;
  for (double y : starts) {
    if (std::isnan(y) || y < s.z()) throw DomainError("start below the killing level");
    std::vector<double> c(K);
    for (int k = 1; k <= K; ++k) c[k - 1] = std::exp(-s.lambda(k) * t) * s.psi(k, y);
    double sup = 0, peak = 0;
    // Grid nodes past z, then x = infinity.
    for (std::size_t i = 1; i <= grid.size(); ++i) {
      double ry = 0, ri = 0;
      for (int k = 0; k < K; ++k) {
        const auto& pr = s.pairs()[k];
        const double p = i < grid.size() ? pr.psi[i] : pr.psi_inf;
        ry += c[k] * p;
        ri += c_inf[k] * p;
      }
      peak = std::max(peak, std::abs(ry));
      if (ry <= 10 * trunc) continue;
      sup = std::max(sup, std::abs(ri / ry - 1));
    }
    if (!(trunc <= 0.1 * peak))
      throw TruncationDominates("ratio at t=" + g17(t) + ": tail estimate " + g17(trunc) +
                                " vs peak density " + g17(peak));
    out.emplace_back(y, sup);
  }
  return out;
}

SpectralConstants fit_constants(const Spectrum& s, double eps, double B) {
  SpectralConstants c;
  const int K = s.size();
  const auto& model = s.tables().model();
  c.linear_rate = kInfinity;
  c.growth_const = -kInfinity;
  double mx = 0, my = 0;
  for (int k = 1; k <= K; ++k) {
    const auto& pr = s.pair(k);
    c.linear_rate = std::min(c.linear_rate, pr.lambda / k);
    const double ls = std::log(pr.sup_norm);
    c.growth_const = std::max(c.growth_const, ls - eps * pr.lambda);
    mx += pr.lambda;
    my += ls;
    double d = 0;
    const auto grid = s.grid();
    for (std::size_t i = 0; i < grid.size(); ++i)
      d = std::max(d, std::abs(pr.dpsi[i]) * (model.q(grid[i]) + B));
    c.derivative_const = std::max(c.derivative_const, d / (pr.lambda * pr.sup_norm));
  }
  if (K >= 2) {
    mx /= K;
    my /= K;
    double sxy = 0, sxx = 0;
    for (int k = 1; k <= K; ++k) {
      const double dx = s.lambda(k) - mx;
      sxy += dx * (std::log(s.pair(k).sup_norm) - my);
      sxx += dx * dx;
    }
    c.growth_eps = sxy / sxx;
  }
  return c;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s, std::span<const std::string> header) {
  write_header_lines(os, header);
  os << "k,lambda,psi_inf,zero_count,norm_residual\n";
  for (const auto& pr : s.pairs())
    os << pr.index << ',' << g17(pr.lambda) << ',' << g17(pr.psi_inf) << ',' << pr.zero_count
       << ',' << g17(pr.norm_residual) << '\n';
}

void write_density_csv(std::ostream& os, std::span<const double> xs, std::span<const double> rs,
                       std::span<const std::string> header) {
  if (xs.size() != rs.size()) throw DomainError("density columns differ in length");
  write_header_lines(os, header);
  os << "x,r\n";
  for (std::size_t i = 0; i < xs.size(); ++i) os << g17(xs[i]) << ',' << g17(rs[i]) << '\n';
}

}  // namespace descent
