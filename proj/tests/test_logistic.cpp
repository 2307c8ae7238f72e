#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/stats/logistic.hpp"

using namespace vibecheck;
using stats::FeatureTable;

namespace {

FeatureTable random_table(std::mt19937_64& rng, int n, int k, bool discrete) {
  FeatureTable t;
  t.X.resize(n, k);
  t.y.resize(n);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> s(-1, 1);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::VectorXd w(k);
  for (int j = 0; j < k; ++j) w[j] = g(rng);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) t.X(i, j) = discrete ? s(rng) : g(rng);
    const double p = 1.0 / (1.0 + std::exp(-t.X.row(i).dot(w)));
    t.y[i] = u(rng) < p ? 1.0 : -1.0;
  }
  t.y[0] = 1.0;
  t.y[1] = -1.0;
  return t;
}

std::vector<std::vector<double>> rows(const FeatureTable& t) {
  std::vector<std::vector<double>> out(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) out[i][j] = t.X(i, j);
  return out;
}

}  // namespace

TEST(Logistic, MatchesLongDoubleReference) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 12; ++t) {
    const int n = 30 + 20 * t, k = 1 + t % 5;
    const auto table = random_table(rng, n, k, t % 2 == 0);
    const double lambda = t % 3 == 0 ? 0.1 : 1e-3;
    const bool intercept = t % 4 == 1;
    const auto m = stats::fit_logistic(table, lambda, intercept);
    const auto ref = fixtures::reference_logistic(rows(table), std::vector<double>(table.y.data(), table.y.data() + n),
                                                  lambda, intercept);
    ASSERT_TRUE(m.converged);
    for (int j = 0; j < k; ++j) EXPECT_NEAR(m.weights[j], static_cast<double>(ref[j]), 1e-6);
    if (intercept) EXPECT_NEAR(m.intercept, static_cast<double>(ref[k]), 1e-6);
  }
}

TEST(Logistic, LossHistoryNeverIncreases) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto table = random_table(rng, 200, 6, false);
    const auto m = stats::fit_logistic(table, 1e-3, true);
    ASSERT_GE(m.loss_history.size(), 2u);
    EXPECT_NEAR(m.loss_history.front(), std::log(2.0), 1e-12);
    for (std::size_t i = 1; i < m.loss_history.size(); ++i)
      EXPECT_LE(m.loss_history[i], m.loss_history[i - 1] + 1e-15);
  }
}

TEST(Logistic, SingleBinaryFeatureHasClosedForm) {
  // x = +1 always; 70 rows labelled +1 and 30 labelled -1.
  FeatureTable t;
  t.X = Eigen::MatrixXd::Ones(100, 1);
  t.y = Eigen::VectorXd::Ones(100);
  for (int i = 0; i < 30; ++i) t.y[i] = -1;
  const auto m = stats::fit_logistic(t, 0.0, false);
  // The fit stops at |g| <= 1e-8 and the curvature is 0.21, so the weight is
  // within about 5e-8 of the optimum.
  EXPECT_NEAR(m.weights[0], std::log(0.7 / 0.3), 1e-7);
  EXPECT_NEAR(m.std_errors[0], 1.0 / std::sqrt(100 * 0.7 * 0.3), 1e-9);
  const double z = m.weights[0] / m.std_errors[0];
  EXPECT_NEAR(stats::wald_pvalues(m)[0], static_cast<double>(2 * (1 - fixtures::simpson_normal_cdf(std::fabs(z)))),
              1e-10);
}

TEST(Logistic, RowWeightScalesStandardErrors) {
  std::mt19937_64 rng(8);
  auto t = random_table(rng, 300, 2, true);
  const auto full = stats::fit_logistic(t, 1e-3, false);
  t.row_weight = 0.5;
  const auto half = stats::fit_logistic(t, 1e-3, false);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(half.std_errors[j], full.std_errors[j] * std::sqrt(2.0), 1e-9);
}

TEST(Logistic, ZeroColumnIsDegenerateWithUnitPValue) {
  std::mt19937_64 rng(4);
  auto t = random_table(rng, 100, 3, true);
  t.X.col(1).setZero();
  const auto m = stats::fit_logistic(t, 1e-3, false);
  ASSERT_EQ(m.degenerate.size(), 3u);
  EXPECT_TRUE(m.degenerate[1]);
  EXPECT_FALSE(m.degenerate[0]);
  EXPECT_EQ(m.weights[1], 0.0);
  EXPECT_EQ(stats::wald_pvalues(m)[1], 1.0);
}

TEST(Logistic, InputErrors) {
  FeatureTable t;
  t.X = Eigen::MatrixXd::Ones(3, 1);
  t.y = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(stats::fit_logistic(t, 0.1, false), SingleClass);
  t.y = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(stats::fit_logistic(t, 0.1, false), LengthMismatch);
  t.X = Eigen::MatrixXd::Ones(1, 1);
  t.y = Eigen::VectorXd::Ones(1);
  EXPECT_THROW(stats::fit_logistic(t, 0.1, false), EmptyInput);
}

TEST(Logistic, NormalTailMatchesSimpsonIntegral) {
  for (double z : {0.0, 0.5, 1.0, 1.96, 2.5, 4.0, -1.3})
    EXPECT_NEAR(stats::two_sided_normal_p(z), static_cast<double>(2 * (1 - fixtures::simpson_normal_cdf(std::fabs(z)))),
                1e-12);
}

TEST(Logistic, AccuracyCountsZeroDecisionAsWrong) {
  FeatureTable t;
  t.X.resize(4, 1);
  t.X << 1, -1, 0, 1;
  t.y.resize(4);
  t.y << 1, -1, 1, -1;
  stats::LogisticModel m;
  m.weights = Eigen::VectorXd::Ones(1);
  EXPECT_DOUBLE_EQ(stats::accuracy(m, t), 0.5);
}
