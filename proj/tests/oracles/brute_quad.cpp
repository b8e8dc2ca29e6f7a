#include "brute_quad.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12);
}

double decay(const Increment& dgamma, double y, double s) {
  const double d = dgamma(y, s);
  return d < 700 ? std::exp(-d) : 0.0;
}

// Length over which gamma grows by one from y.
double unit_length(const Increment& dgamma, double y) {
  double lo = 0, hi = 1;
  while (dgamma(y, hi) < 1) hi *= 2;
  while (dgamma(y, hi / 2) >= 1) hi /= 2;
  lo = hi / 2;
  for (int i = 0; i < 60 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dgamma(y, mid) < 1 ? lo : hi) = mid;
  }
  return hi;
}

// int_z^inf f, with [2z + 1, inf) mapped onto (0, 1] by y = B / u.
template <class F>
double to_infinity(F f, double z) {
  const double B = 2 * z + 1;
  const double tail = integrate(
      [&](double u) { return u > 0 ? f(B / u) * B / (u * u) : 0.0; }, 0.0, 1.0);
  return integrate(f, z, B) + tail;
}

}  // namespace

double square_increment(double y, double s) { return 2 * s * (y * y + y * s + s * s / 3); }

double h_direct(const Increment& dgamma, double y) {
  const double L = unit_length(dgamma, y);
  return L * integrate([&](double v) { return decay(dgamma, y, L * v); }, 0.0, kInf);
}

double m_direct(const Increment& dgamma, double z) {
  return 2 * to_infinity([&](double y) { return h_direct(dgamma, y); }, z);
}

double var_direct(const Increment& dgamma, double z) {
  auto w = [&](double y) {
    const double L = unit_length(dgamma, y);
    return L * integrate(
                   [&](double v) {
                     const double hv = h_direct(dgamma, y + L * v);
                     return hv * hv * decay(dgamma, y, L * v);
                   },
                   0.0, kInf);
  };
  return 8 * to_infinity(w, z);
}

double ruin_direct(const Increment& dgamma, double z, double x) {
  auto f = [&](double u) { return decay(dgamma, u, x - u); };
  return integrate(f, 0.0, z) / integrate(f, 0.0, x);
}

}  // namespace oracle
