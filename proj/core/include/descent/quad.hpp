#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "descent/model.hpp"

namespace descent {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TableOptions {
  double tol = 1e-9;
  double x_max = 0.0;  // 0 selects default_x_max
  int refine = 1;      // replay with every adaptive interval split this many times
  std::vector<double> extra_nodes;
};

/// Smallest point of the ladder 2^(k/4) where q reaches 10^3.
double default_x_max(const DriftModel& model);

/// Grids of the potential and of the h-form integrals on [0, x_max].
///
/// h = e^gamma int_y^inf e^-gamma and w = e^gamma int_y^inf h^2 e^-gamma are
/// obtained from backward linear ODEs, together with the two higher
/// cumulant densities of the descent time from infinity. Beyond x_max every
/// quantity is closed with its large-q asymptotic expansion.
class PotentialTables {
 public:
  const DriftModel& model() const noexcept { return model_; }
  double x_max() const noexcept { return x_max_; }
  double tol() const noexcept { return tol_; }

  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> gamma_vals() const noexcept { return gamma_; }
  std::span<const double> h_vals() const noexcept { return h_; }
  std::span<const double> w_vals() const noexcept { return w_; }
  std::span<const double> m_vals() const noexcept { return m_; }
  std::span<const double> M_vals() const noexcept { return M_; }
  std::span<const double> var_vals() const noexcept { return var_; }

  double gamma(double x) const;
  double h(double x) const;
  double w(double x) const;
  /// E_inf(T_z). Beyond x_max the tail expansion is used.
  double m(double z) const;
  double M(double z) const;
  /// Var_inf(T_z) = 8 int_z^inf w.
  double var(double z) const;
  /// Third and fourth cumulants of T_z under P_inf.
  double cumulant3(double z) const;
  double cumulant4(double z) const;
  /// E_inf((T_z - m(z))^4) assembled from cumulants.
  double central4(double z) const;

  double m_tail() const noexcept { return m_tail_; }
  double var_tail() const noexcept { return var_tail_; }
  /// Cumulants of T_{x_max} from infinity, index 1..n.
  std::vector<double> tail_cumulants(int n) const;

  /// max |m''/m'| over the grid.
  double max_log_slope_m() const;

 private:
  friend PotentialTables build_tables(const DriftModel&, const TableOptions&);
  explicit PotentialTables(DriftModel model) : model_(std::move(model)) {}

  struct Node {
    std::size_t i;
    double x0, x1;
  };
  Node locate(double x) const;
  double interp(const std::vector<double>& v, const std::vector<double>& dv, double x) const;

  DriftModel model_;
  double x_max_ = 0, tol_ = 0;
  std::vector<double> grid_;
  std::vector<double> gamma_, dgamma_;
  std::vector<double> h_, dh_, w_, dw_;
  std::vector<double> i_h_, i_w_, i_v3_, i_r4_;  // int_x^{x_max}
  std::vector<double> v3_, r4_;
  std::vector<double> m_, M_, var_;
  double m_tail_ = 0, var_tail_ = 0, k3_tail_ = 0, k4_tail_ = 0;
};

PotentialTables build_tables(const DriftModel& model, const TableOptions& options = {});

double lyapunov_m(const PotentialTables& tables, double z);
double deterministic_time_M(const PotentialTables& tables, double z);

/// Moments E_x(T_z^n), n = 1..n_max, for x in [z, x_max] and x = infinity.
class MomentTable {
 public:
  double z_anchor() const noexcept { return z_; }
  int n_max() const noexcept { return n_max_; }
  std::span<const double> grid() const noexcept { return grid_; }
  /// E_x(T_z^n); x may be kInfinity.
  double value(double x, int n) const;
  /// Moments at infinity, index 0..n_max (index 0 is 1).
  std::span<const double> at_infinity() const noexcept { return inf_; }
  double var() const noexcept { return var_; }
  double central4() const noexcept { return central4_; }
  /// Set when n_max exceeds the default depth.
  bool accuracy_warning() const noexcept { return n_max_ > 4; }

 private:
  friend MomentTable build_moments(const PotentialTables&, double, int, std::span<const double>);
  double z_ = 0, x_max_ = 0;
  int n_max_ = 0;
  std::vector<double> grid_;
  std::vector<std::vector<double>> u_, du_;  // [n-1][node]
  std::vector<double> inf_;
  double var_ = 0, central4_ = 0;
};

/// Runs the backward recursion for the moments of T_z. Points in `nodes`
/// become exact grid nodes.
MomentTable build_moments(const PotentialTables& tables, double z, int n_max = 4,
                          std::span<const double> nodes = {});

double hitting_moment(const MomentTable& table, double x, int n);
double hitting_moment(const PotentialTables& tables, double x, double z, int n, int n_max = 4);

/// E_xi(T_z^n) rebuilt from moments from infinity at the two anchors.
double hitting_moment_combinatorial(const MomentTable& at_xi, const MomentTable& at_z, int n);
double hitting_moment_combinatorial(const PotentialTables& tables, double xi, double z, int n);

double variance(const PotentialTables& tables, double z);

/// 1 / (1 - lambda m(z)); BoundInvalid unless lambda m(z) < 1.
double exp_moment_bound(const PotentialTables& tables, double z, double lambda);

/// E_x of the occupation integral of f before T_z. Breakpoints of f become
/// grid nodes.
double green_occupation(const PotentialTables& tables, double x, double z,
                        const std::function<double(double)>& f,
                        std::span<const double> breakpoints = {});

struct CharacteristicValue {
  std::complex<double> value;
  double bound;  // truncation bound on |remainder|
};

/// Truncated moment series for E_x exp(i theta T_z).
CharacteristicValue characteristic_function(const PotentialTables& tables, double x, double z,
                                            double theta, int n_terms);

/// z with m(z) = t for t in [m(x_max), m(0)].
double m_inverse(const PotentialTables& tables, double t);
/// As m_inverse but continues past x_max through the tail expansion of m.
double m_inverse_extended(const PotentialTables& tables, double t);

/// Limit of int q^-1 / (q^2 int q^-3), extrapolated along the table tail.
double sigma_Sigma(const PotentialTables& tables);

struct TailDiagnostics {
  double z;
  double m_over_M_minus_1;
  double two_qh_minus_1;
  double w_over_h3_minus_1;
  double var_ratio_minus_1;  // Var / int q^-3 - 1
};
TailDiagnostics tail_diagnostics(const PotentialTables& tables, double z);

/// Rows z, gamma, h, w, m, M, var at 17 significant digits. Every entry of
/// `header` is written as a leading "# " comment line.
void write_tables_csv(std::ostream& os, const PotentialTables& tables,
                      std::span<const std::string> header = {});

}  // namespace descent
