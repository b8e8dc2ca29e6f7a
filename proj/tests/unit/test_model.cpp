#include <cmath>

#include <gtest/gtest.h>

#include "descent/model.hpp"

using namespace descent;

TEST(Model, PowerLawValueAndSlope) {
  const auto m = DriftModel::power_law(2.0, 3.0);
  const auto v = m.eval(1.5);
  EXPECT_DOUBLE_EQ(v.q, 2.0 * 1.5 * 1.5 * 1.5);
  EXPECT_NEAR(v.dq, 6.0 * 1.5 * 1.5, 1e-12);
}

TEST(Model, GammaMatchesClosedForm) {
  const auto m = DriftModel::power_law(1.0, 2.0);
  for (double x : {0.0, 0.5, 1.0, 3.0, 10.0})
    EXPECT_NEAR(m.gamma(x), 2.0 * x * x * x / 3.0, 1e-8 * std::max(1.0, x * x * x));
  const auto e = DriftModel::exp_poly({0.0, 1.0});
  for (double x : {0.0, 0.5, 2.0}) EXPECT_NEAR(e.gamma(x), 2.0 * (std::exp(x) - 1.0), 1e-8);
}

TEST(Model, FlooredPowerLawIsC1AtFloor) {
  const auto m = DriftModel::power_law(1.0, 1.5, 1.0);
  const double eps = 1e-7;
  EXPECT_NEAR(m.q(1.0 - eps), m.q(1.0 + eps), 1e-6);
  EXPECT_NEAR(m.dq(1.0 - eps), m.dq(1.0 + eps), 1e-5);
  EXPECT_GT(m.q(0.0), 0.0);
}

TEST(Model, CustomSplineInterpolatesKnots) {
  const auto m = DriftModel::custom({0, 1, 2, 3}, {1, 2, 5, 10});
  EXPECT_NEAR(m.q(0), 1, 1e-14);
  EXPECT_NEAR(m.q(2), 5, 1e-14);
  EXPECT_NEAR(m.q(3), 10, 1e-14);
  // continued past the last knot with matching value and slope
  EXPECT_NEAR(m.q(3 + 1e-9), 10, 1e-6);
  EXPECT_GT(m.q(6), m.q(3));
}

TEST(Model, RejectsBadParameters) {
  EXPECT_THROW(DriftModel::power_law(-1.0, 2.0), DomainError);
  EXPECT_THROW(DriftModel::custom({0, 1}, {1}), DomainError);
  EXPECT_THROW(DriftModel::custom({0, 2, 1}, {1, 2, 3}), DomainError);
}

TEST(Model, ScaleFunctionIsIncreasingAndLogSafe) {
  const auto m = DriftModel::power_law(1.0, 2.0);
  double prev = -INFINITY;
  for (double x : {0.1, 1.0, 5.0, 20.0, 100.0}) {
    const auto s = scale_lambda(m, x);
    EXPECT_GT(s.log_value, prev);
    prev = s.log_value;
  }
  EXPECT_THROW(scale_lambda(m, 100.0).value(), OverflowSignal);
  EXPECT_NEAR(scale_lambda(m, 1e-3).value(), 1e-3, 1e-9);
}

TEST(Model, TailInversePowers) {
  const auto m = DriftModel::power_law(1.0, 2.0);
  EXPECT_NEAR(m.tail_inverse_power(1, 4.0), 0.25, 1e-12);
  EXPECT_NEAR(m.tail_inverse_power(3, 2.0), 1.0 / (5.0 * 32.0), 1e-12);
  EXPECT_TRUE(std::isinf(DriftModel::exp_poly({0.0}).tail_inverse_power(1, 1.0)));
}

TEST(Model, HypothesesPowerLawSquare) {
  const auto r = check_hypotheses(DriftModel::power_law(1.0, 2.0), 128.0, 1e-6);
  EXPECT_EQ(r.h1, Verdict::pass);
  EXPECT_EQ(r.h2, Verdict::pass);
  EXPECT_EQ(r.h3, Verdict::pass);
  EXPECT_NEAR(r.h3_a, 1.0, 1e-12);
  ASSERT_TRUE(r.b_limit && r.sigma);
  EXPECT_NEAR(*r.b_limit, 2.0, 1e-3);
  EXPECT_NEAR(*r.sigma, 5.0, 1e-3);
}

TEST(Model, HypothesesPowerLawCube) {
  const auto r = check_hypotheses(DriftModel::power_law(1.0, 3.0), 64.0, 1e-6);
  ASSERT_TRUE(r.b_limit && r.sigma);
  EXPECT_NEAR(*r.b_limit, 1.5, 1e-3);
  EXPECT_NEAR(*r.sigma, 4.0, 1e-3);
}

TEST(Model, HypothesesConstantDriftFailsH1) {
  const auto r = check_hypotheses(DriftModel::exp_poly({0.0}), 128.0, 1e-6);
  EXPECT_EQ(r.h1, Verdict::fail);
  EXPECT_NE(r.h2, Verdict::pass);
}

TEST(Model, ExtrapolateLimitAitken) {
  std::vector<double> seq;
  for (int k = 0; k < 8; ++k) seq.push_back(3.0 + std::pow(0.5, k));
  const auto lim = extrapolate_limit(seq, 1e-8);
  ASSERT_TRUE(lim);
  EXPECT_NEAR(*lim, 3.0, 1e-10);
  EXPECT_FALSE(extrapolate_limit(std::vector<double>{1, -1, 1, -2, 5}, 1e-8));
}
