// Library results against references that share no code with it: published
// Philox vectors, nested Gauss-Kronrod quadrature, a finite-difference
// eigensolver, closed forms, and values frozen from arbitrary-precision runs.
#include <cmath>

#include <gtest/gtest.h>

#include "brute_quad.hpp"
#include "descent/rng.hpp"
#include "descent/sde.hpp"
#include "descent/spectral.hpp"
#include "fd_eigen.hpp"

using namespace descent;

namespace {

const PotentialTables& square() {
  static const PotentialTables t = build_tables(DriftModel::power_law(1.0, 2.0));
  return t;
}


}  // namespace

TEST(Oracle, PhiloxKnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

// Frozen from 30-digit quadrature of e^gamma(y) int_y^inf e^-gamma.
TEST(Oracle, FrozenH) {
  EXPECT_NEAR(square().h(0.0), 1.0222063652016373624, 1e-9);
  EXPECT_NEAR(square().h(1.0), 0.31454896057638503093, 1e-9);
}

// Frozen from adaptive double quadrature of the nested integrals.
TEST(Oracle, FrozenMomentsOfSquareDrift) {
  const auto& t = square();
  EXPECT_NEAR(t.m(0), 2.089811706148898, 1e-8);
  EXPECT_NEAR(t.m(1), 0.8698247690564614, 1e-8 * 0.87);
  EXPECT_NEAR(t.m(5), 0.19960447237656143, 1e-8 * 0.2);
  EXPECT_NEAR(t.m(20), 0.049998437809904164, 1e-8 * 0.05);
  EXPECT_NEAR(t.var(1), 0.05495718321331341, 1e-8 * 0.055);
  EXPECT_NEAR(t.var(5), 6.245088449828211e-05, 1e-8 * 6.2e-5);
}

TEST(Oracle, BruteForceQuadrature) {
  const auto& t = square();
  for (double z : {0.5, 2.0, 8.0}) {
    EXPECT_NEAR(t.h(z), oracle::h_direct(oracle::square_increment, z), 1e-9 * t.h(z)) << z;
    EXPECT_NEAR(t.m(z), oracle::m_direct(oracle::square_increment, z), 1e-8 * t.m(z)) << z;
  }
  EXPECT_NEAR(t.var(2.0), oracle::var_direct(oracle::square_increment, 2.0), 1e-7 * t.var(2.0));
}

TEST(Oracle, ExpDriftAgainstBruteForce) {
  const auto model = DriftModel::exp_poly({0.0, 1.0});
  const auto t = build_tables(model);
  auto g = [](double y, double s) { return 2 * std::exp(y) * std::expm1(s); };
  for (double z : {0.0, 1.0, 3.0}) EXPECT_NEAR(t.m(z), oracle::m_direct(g, z), 1e-8 * t.m(z));
  // For q = e^x, q'/q^2 tends to 0 and Sigma = 3.
  EXPECT_NEAR(sigma_Sigma(t), 3.0, 1e-2);
}

TEST(Oracle, DeterministicDescentClosedForm) {
  const auto t = build_tables(DriftModel::power_law(2.0, 3.0));
  for (double z : {1.0, 4.0}) EXPECT_NEAR(t.M(z), 1.0 / (4.0 * z * z), 1e-8 / (4 * z * z));
}

TEST(Oracle, FiniteDifferenceEigenvalues) {
  const auto s = solve_spectrum(square(), 1.0, 3);
  const auto fd = oracle::fd_eigenvalues(square().model(), 1.0, 6.0, 3, 20000);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(s.lambda(k) / fd[k - 1], 1.0, 1e-6) << k;
}

TEST(Oracle, RuinAgainstScaleFunction) {
  const auto model = DriftModel::power_law(1.0, 2.0);
  const double exact = oracle::ruin_direct(oracle::square_increment, 1.0, 2.0);
  EXPECT_NEAR(exact, 0.038098, 1e-5);
  SimOptions o;
  o.bridge_correction = true;
  const auto e = ruin_probability_mc(model, 1.0, 2.0, 0.0, 20000, 1e-3, 31, o);
  EXPECT_NEAR(e.value, exact, 3 * e.se + 1e-3);
}
