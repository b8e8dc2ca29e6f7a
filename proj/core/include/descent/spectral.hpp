#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "descent/model.hpp"
#include "descent/quad.hpp"

namespace descent {

struct SpectrumOptions {
  double x_max = 0.0;    // right end of the shooting interval; 0 uses the table end
  double rtol = 1e-11;   // sweep tolerance
  double lambda_rtol = 1e-13;
  double lambda_cap = 0.0;  // stop before K pairs once lambda exceeds this; 0 disables
};

/// Eigenpair of the generator killed at z, normalized in L2(mu_z) with
/// mu_z(dx) = 2 exp(-(gamma(x) - gamma(z))) dx and psi > 0 near infinity.
struct EigenPair {
  int index = 0;
  double lambda = 0;
  std::vector<double> psi;   // on Spectrum::grid()
  std::vector<double> dpsi;
  double psi_inf = 0;        // limit at infinity
  double mu_integral = 0;    // int psi dmu_z
  double sup_norm = 0;       // sup over [z, inf]
  int zero_count = 0;        // zeros of psi on [z, x_max], boundary included
  int slope_zero_count = 0;  // interior zeros of psi'
  double norm_residual = 0;  // max_j |<psi_j, psi_k> - delta_jk|
};

class Spectrum {
 public:
  double z() const noexcept { return z_; }
  double x_max() const noexcept { return x_max_; }
  int size() const noexcept { return static_cast<int>(pairs_.size()); }
  const EigenPair& pair(int k) const { return pairs_.at(static_cast<std::size_t>(k - 1)); }
  std::span<const EigenPair> pairs() const noexcept { return pairs_; }
  double lambda(int k) const { return pair(k).lambda; }
  std::span<const double> grid() const noexcept { return grid_; }
  /// Trapezoid weights of mu_z on the grid.
  std::span<const double> mu_weights() const noexcept { return mu_weights_; }
  /// mu_z([z, inf)).
  double mu_total() const noexcept { return mu_total_; }
  /// Gram matrix of the normalized eigenfunctions, row-major K x K.
  std::span<const double> gram() const noexcept { return gram_; }
  const PotentialTables& tables() const noexcept { return *tables_; }

  /// psi_k(x) for x in [z, inf]; past x_max through the cumulant expansion.
  double psi(int k, double x) const;
  double dpsi(int k, double x) const;

 private:
  friend Spectrum solve_spectrum(const PotentialTables&, double, int, const SpectrumOptions&);
  std::shared_ptr<const PotentialTables> tables_;
  double z_ = 0, x_max_ = 0, gamma_z_ = 0, mu_total_ = 0;
  std::vector<double> grid_, mu_weights_, gram_;
  std::vector<EigenPair> pairs_;
};

/// First K eigenpairs of (1/2) psi'' - q psi' = -lambda psi on [z, inf) with
/// psi(z) = 0, by Pruefer-angle shooting from x_max.
Spectrum solve_spectrum(const PotentialTables& tables, double z, int K,
                        const SpectrumOptions& options = {});

/// Smallest power-of-two K (from 8, at most k_max) with
/// exp(-lambda_K t) sup|psi_K|^2 < 1e-8.
Spectrum solve_spectrum_for_time(const PotentialTables& tables, double z, double t, int k_max = 64,
                                 const SpectrumOptions& options = {});

/// Prufer angle at z of the solution started at x_max, as a function of lambda.
double shooting_angle(const PotentialTables& tables, double z, double lambda, double x_max = 0,
                      double rtol = 1e-11);

/// max_x |psi_k(x) - 2 lambda_k int_z^x e^gamma int_y^inf e^-gamma psi_k|, with the
/// inner integral carried as a backward h-form ODE and integrated by Radau IIA on
/// every `stride`-th grid node.
double eigen_integral_residual(const Spectrum& spectrum, int k, int stride = 1);

/// Density of the quasi-stationary law on [z, inf) against Lebesgue measure.
class QsdDensity {
 public:
  explicit QsdDensity(const Spectrum& s) : s_(&s) {}
  double operator()(double x) const;

 private:
  const Spectrum* s_;
};
QsdDensity qsd_density(const Spectrum& spectrum);

struct SeriesValue {
  double value = 0;
  double truncation = 0;  // estimated size of the omitted terms
  double clipped = 0;     // amount removed by clipping to the admissible range
  bool negative = false;  // raw sum below -truncation
};

/// P_y(T_z > t); y may be kInfinity.
SeriesValue survival_probability(const Spectrum& spectrum, double t, double y);

/// r(t, y, x), the density of X_t on {T_z > t} against mu_z.
SeriesValue transition_density(const Spectrum& spectrum, double t, double y, double x);

/// psi_1(y) * int psi_1 dmu_z.
double yaglom_constant(const Spectrum& spectrum, double y);

/// sup_x |r(t, inf, x) / r(t, y, x) - 1| for every start y, over the grid
/// nodes and x = infinity where r(t, y, x) exceeds ten times its truncation estimate.
std::vector<std::pair<double, double>> ratio_uniformity(const Spectrum& spectrum,
                                                        std::span<const double> starts, double t);

struct SpectralConstants {
  double linear_rate = 0;    // min_k lambda_k / k
  double growth_eps = 0;     // least-squares slope of log sup|psi_k| against lambda_k
  double growth_const = 0;   // max_k log sup|psi_k| - eps lambda_k at the requested eps
  double derivative_const = 0;  // max_k sup_x |psi_k'| (q + B) / (lambda_k sup|psi_k|)
};
SpectralConstants fit_constants(const Spectrum& spectrum, double eps = 0.1, double B = 1.0);

/// Rows k, lambda, psi_inf, zero_count, norm_residual.
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum,
                        std::span<const std::string> header = {});
/// Rows x, r.
void write_density_csv(std::ostream& os, std::span<const double> xs, std::span<const double> rs,
                       std::span<const std::string> header = {});

}  // namespace descent
