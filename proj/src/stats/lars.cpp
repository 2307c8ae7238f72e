#include "vibecheck/stats/lars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vibecheck::stats {

std::vector<std::size_t> lars_path_order(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t k) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (k > static_cast<std::size_t>(p)) throw std::invalid_argument("lars_order: k exceeds the number of columns");
  if (y.size() != n) throw std::invalid_argument("lars_order: label length differs from row count");

  Eigen::MatrixXd Xs = X.rowwise() - X.colwise().mean();
  std::vector<bool> usable(static_cast<std::size_t>(p), false);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = Xs.col(j).norm();
    if (norm > 1e-12) {
      Xs.col(j) /= norm;
      usable[static_cast<std::size_t>(j)] = true;
    } else {
      Xs.col(j).setZero();
    }
  }
  const Eigen::VectorXd yc = y.array() - y.mean();

  std::vector<std::size_t> order;
  std::vector<bool> active(static_cast<std::size_t>(p), false);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  const double eps = 1e-12;

  auto inactive_usable = [&] {
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < p; ++j) count += usable[j] && !active[j];
    return count;
  };

  // First entrant: the maximal absolute correlation.
  Eigen::VectorXd c = Xs.transpose() * (yc - mu);
  {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < p; ++j)
      if (usable[j] && (best < 0 || std::fabs(c[j]) > std::fabs(c[best]))) best = j;
    if (best >= 0 && std::fabs(c[best]) > eps) {
      active[best] = true;
      order.push_back(static_cast<std::size_t>(best));
    }
  }

  while (!order.empty() && inactive_usable() > 0) {
    c = Xs.transpose() * (yc - mu);
    const std::size_t m = order.size();
    double C = 0.0;
    for (std::size_t a : order) C = std::max(C, std::fabs(c[static_cast<Eigen::Index>(a)]));
    if (C <= eps) break;

    Eigen::MatrixXd XA(n, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const auto a = static_cast<Eigen::Index>(order[i]);
      XA.col(static_cast<Eigen::Index>(i)) = Xs.col(a) * (c[a] >= 0 ? 1.0 : -1.0);
    }
    const Eigen::MatrixXd G = XA.transpose() * XA;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-10) break;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    const Eigen::VectorXd Ginv1 = ldlt.solve(ones);
    const double denom = ones.dot(Ginv1);
    if (!(denom > 0)) break;
    const double AA = 1.0 / std::sqrt(denom);
    const Eigen::VectorXd u = XA * (AA * Ginv1);
    const Eigen::VectorXd a = Xs.transpose() * u;

    double gamma = std::numeric_limits<double>::infinity();
    Eigen::Index next = -1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!usable[j] || active[j]) continue;
      for (double g : {(C - c[j]) / (AA - a[j]), (C + c[j]) / (AA + a[j])}) {
        if (std::isfinite(g) && g > eps && g < gamma) {
          gamma = g;
          next = j;
        }
      }
    }
    if (next < 0) break;
    mu += gamma * u;
    active[next] = true;
    order.push_back(static_cast<std::size_t>(next));
  }

  // Columns the path never reached, by residual correlation.
  c = Xs.transpose() * (yc - mu);
  std::vector<std::size_t> rest;
  for (Eigen::Index j = 0; j < p; ++j)
    if (usable[j] && !active[j]) rest.push_back(static_cast<std::size_t>(j));
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t i, std::size_t j) {
    return std::fabs(c[static_cast<Eigen::Index>(i)]) > std::fabs(c[static_cast<Eigen::Index>(j)]);
  });
  order.insert(order.end(), rest.begin(), rest.end());
  for (Eigen::Index j = 0; j < p; ++j)
    if (!usable[j]) order.push_back(static_cast<std::size_t>(j));

  order.resize(k);
  return order;
}

std::vector<std::string> lars_order(const FeatureTable& table, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t j : lars_path_order(table.X, table.y, k)) out.push_back(table.columns.at(j));
  return out;
}

}  // namespace vibecheck::stats
