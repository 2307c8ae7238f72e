#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "vibecheck/stats/lars.hpp"

using namespace vibecheck;

namespace {

double abs_corr(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd xc = x.array() - x.mean(), yc = y.array() - y.mean();
  return std::fabs(xc.dot(yc)) / (xc.norm() * yc.norm());
}

}  // namespace

TEST(Lars, FirstEntrantHasLargestCorrelation) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 30; ++t) {
    Eigen::MatrixXd X(80, 6);
    Eigen::VectorXd y(80);
    for (int i = 0; i < 80; ++i) {
      for (int j = 0; j < 6; ++j) X(i, j) = g(rng);
      y[i] = 0.8 * X(i, 2) - 0.5 * X(i, 4) + g(rng);
    }
    const auto order = stats::lars_path_order(X, y, 6);
    std::size_t best = 0;
    for (std::size_t j = 1; j < 6; ++j)
      if (abs_corr(X.col(j), y) > abs_corr(X.col(best), y)) best = j;
    EXPECT_EQ(order[0], best);
    EXPECT_EQ(std::set<std::size_t>(order.begin(), order.end()).size(), 6u);
  }
}

TEST(Lars, ZeroVarianceColumnsComeLastAndKTruncates) {
  Eigen::MatrixXd X(6, 3);
  X << 1, 5, 1, 2, 5, 0, 3, 5, 1, 4, 5, 0, 5, 5, 1, 6, 5, 0;
  Eigen::VectorXd y(6);
  y << 1, 2, 3, 4, 5, 7;
  const auto order = stats::lars_path_order(X, y, 3);
  EXPECT_EQ(order[0], 0u);
  EXPECT_EQ(order[2], 1u);
  EXPECT_EQ(stats::lars_path_order(X, y, 1).size(), 1u);
  EXPECT_THROW(stats::lars_path_order(X, y, 4), std::invalid_argument);
}

TEST(Lars, DuplicateColumnsDoNotBreakThePath) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(50, 3);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    X(i, 0) = g(rng);
    X(i, 1) = X(i, 0);
    X(i, 2) = g(rng);
    y[i] = X(i, 0) + 0.3 * X(i, 2);
  }
  const auto order = stats::lars_path_order(X, y, 3);
  EXPECT_EQ(std::set<std::size_t>(order.begin(), order.end()).size(), 3u);
}

TEST(Lars, OrderReturnsColumnIds) {
  stats::FeatureTable t;
  t.X.resize(4, 2);
  t.X << 1, 0, -1, 1, 1, 0, -1, -1;
  t.y.resize(4);
  t.y << 1, -1, 1, -1;
  t.columns = {"signal", "noise"};
  const auto ids = stats::lars_order(t, 2);
  EXPECT_EQ(ids, (std::vector<std::string>{"signal", "noise"}));
}
