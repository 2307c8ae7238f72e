#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vibecheck/stats/logistic.hpp"

namespace vibecheck::stats {

/// Column indices in least-angle regression entry order.
///
/// Columns are centred and scaled to unit norm and y is centred before the
/// path starts. Zero-variance columns never enter and are appended last in
/// index order. If the path stops early (the active set became rank
/// deficient or the residual vanished) the remaining columns follow by
/// decreasing absolute correlation with the final residual. Returns the first
/// `k` indices; throws std::invalid_argument when k exceeds the column count.
std::vector<std::size_t> lars_path_order(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t k);

/// The column ids of the first `k` entrants.
std::vector<std::string> lars_order(const FeatureTable& table, std::size_t k);

}  // namespace vibecheck::stats
