#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vibecheck::stats {

/// Features and ±1 labels for a logistic fit.
struct FeatureTable {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> columns;
  /// Statistical weight of each row in the observed information. The
  /// order-augmented model-matching table holds every record twice, so its
  /// rows count 0.5 each.
  double row_weight = 1.0;
  /// Missing score cells that were imputed as 0.
  std::size_t imputed = 0;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-8;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  bool use_intercept = false;
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  /// Penalized objective at w = 0 followed by its value after every step.
  std::vector<double> loss_history;
  Eigen::VectorXd std_errors;
  double intercept_std_error = 0.0;
  /// Coordinates the observed information does not identify.
  std::vector<bool> degenerate;

  double decision(const Eigen::VectorXd& x) const { return weights.dot(x) + intercept; }
  Eigen::VectorXd decision(const Eigen::MatrixXd& X) const;
};

/// Minimizes mean logistic loss + (lambda/2)|w|^2 by damped Newton steps from
/// w = 0; the intercept is never penalized. Standard errors come from the
/// observed information of the unpenalized loss at the solution. Returns the
/// last iterate with converged = false after max_iterations. Throws EmptyInput
/// for fewer than 2 rows, SingleClass when only one label occurs and
/// LengthMismatch when X and y disagree.
LogisticModel fit_logistic(const FeatureTable& table, double lambda, bool use_intercept,
                           const FitOptions& options = {});

/// Two-sided Wald p-values of the weights, erfc(|w/se| / sqrt 2). Degenerate
/// coordinates and zero weights get 1.
std::vector<double> wald_pvalues(const LogisticModel& model);

/// Two-sided normal tail probability of |z|.
double two_sided_normal_p(double z);

/// Fraction of rows whose decision sign matches the label; a decision of
/// exactly 0 counts as wrong.
double accuracy(const LogisticModel& model, const FeatureTable& table);

}  // namespace vibecheck::stats
