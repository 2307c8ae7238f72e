#include "vibecheck/stats/logistic.hpp"

#include <cmath>

#include "vibecheck/errors.hpp"

namespace vibecheck::stats {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Problem {
  Eigen::MatrixXd Z;  // features, plus a trailing column of ones with an intercept
  Eigen::VectorXd y;  // ±1
  Eigen::VectorXd penalty_mask;
  double lambda;

  double objective(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd margin = (Z * theta).cwiseProduct(y);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margin.size(); ++i) loss += softplus(-margin[i]);
    loss /= static_cast<double>(Z.rows());
    return loss + 0.5 * lambda * theta.cwiseProduct(penalty_mask).squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const Eigen::VectorXd& z) const {
    Eigen::VectorXd r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = sigmoid(z[i]) - (y[i] > 0 ? 1.0 : 0.0);
    return Z.transpose() * r / static_cast<double>(Z.rows()) + lambda * theta.cwiseProduct(penalty_mask);
  }

  Eigen::VectorXd curvature(const Eigen::VectorXd& z) const {
    Eigen::VectorXd w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = sigmoid(z[i]);
      w[i] = p * (1.0 - p);
    }
    return w;
  }
};

Eigen::VectorXd newton_direction(const Eigen::MatrixXd& H, const Eigen::VectorXd& g) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Eigen::VectorXd d = ldlt.solve(-g);
    if (d.allFinite() && d.dot(g) < 0) return d;
  }
  Eigen::VectorXd d = H.completeOrthogonalDecomposition().solve(-g);
  if (d.allFinite() && d.dot(g) < 0) return d;
  return -g;
}

}  // namespace

Eigen::VectorXd LogisticModel::decision(const Eigen::MatrixXd& X) const {
  return (X * weights).array() + intercept;
}

LogisticModel fit_logistic(const FeatureTable& table, double lambda, bool use_intercept, const FitOptions& options) {
  const Eigen::Index n = table.X.rows(), k = table.X.cols();
  if (table.y.size() != n)
    throw LengthMismatch("feature table has " + std::to_string(n) + " rows but " + std::to_string(table.y.size()) +
                         " labels");
  if (n < 2) throw EmptyInput("logistic fit needs at least 2 rows");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < n; ++i) (table.y[i] > 0 ? pos : neg) = true;
  if (!pos || !neg) throw SingleClass("logistic fit needs both labels present");

  const Eigen::Index p = k + (use_intercept ? 1 : 0);
  Problem prob;
  prob.Z.resize(n, p);
  prob.Z.leftCols(k) = table.X;
  if (use_intercept) prob.Z.col(k).setOnes();
  prob.y = table.y;
  prob.penalty_mask = Eigen::VectorXd::Ones(p);
  if (use_intercept) prob.penalty_mask[k] = 0.0;
  prob.lambda = lambda;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  LogisticModel model;
  model.use_intercept = use_intercept;
  model.lambda = lambda;
  double f = prob.objective(theta);
  model.loss_history.push_back(f);

  const Eigen::MatrixXd penalty = (lambda * prob.penalty_mask).asDiagonal();
  bool polished = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd z = prob.Z * theta;
    const Eigen::VectorXd g = prob.gradient(theta, z);
    model.gradient_norm = g.norm();
    if (model.gradient_norm <= options.tolerance) {
      model.converged = true;
      // One extra full step costs little and pushes the iterate well past the
      // tolerance, which keeps the weights stable across implementations.
      if (polished || model.gradient_norm == 0.0) break;
      polished = true;
    }
    const Eigen::VectorXd w = prob.curvature(z);
    const Eigen::MatrixXd H =
        prob.Z.transpose() * w.asDiagonal() * prob.Z / static_cast<double>(n) + penalty;
    const Eigen::VectorXd d = newton_direction(H, g);

    double step = 1.0;
    const double slope = g.dot(d);
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const Eigen::VectorXd candidate = theta + step * d;
      const double fc = prob.objective(candidate);
      if (std::isfinite(fc) && fc <= f + 1e-4 * step * slope) {
        theta = candidate;
        f = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    model.iterations = it + 1;
    model.loss_history.push_back(f);
    if (polished) {
      model.gradient_norm = prob.gradient(theta, prob.Z * theta).norm();
      break;
    }
  }
  if (!model.converged) model.gradient_norm = prob.gradient(theta, prob.Z * theta).norm();
  model.converged = model.gradient_norm <= options.tolerance;

  model.weights = theta.head(k);
  model.intercept = use_intercept ? theta[k] : 0.0;

  // Observed information of the unpenalized summed loss.
  const Eigen::VectorXd w = prob.curvature(prob.Z * theta);
  const Eigen::MatrixXd info = table.row_weight * (prob.Z.transpose() * w.asDiagonal() * prob.Z);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const Eigen::MatrixXd& vectors = eig.eigenvectors();
  const double top = values.size() ? values.maxCoeff() : 0.0;
  const double cutoff = std::max(top * 1e-12 * static_cast<double>(p), 1e-300);

  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd null_weight = Eigen::VectorXd::Zero(p);
  for (Eigen::Index e = 0; e < p; ++e) {
    const Eigen::VectorXd v = vectors.col(e);
    if (values[e] > cutoff) pinv += v * v.transpose() / values[e];
    else null_weight += v.cwiseAbs2();
  }

  model.std_errors = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  model.degenerate.assign(static_cast<std::size_t>(k), true);
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool degenerate = null_weight[j] > 1e-8 || !(pinv(j, j) > 0);
    const double se = degenerate ? std::numeric_limits<double>::infinity() : std::sqrt(pinv(j, j));
    if (j < k) {
      model.std_errors[j] = se;
      model.degenerate[static_cast<std::size_t>(j)] = degenerate;
    } else {
      model.intercept_std_error = se;
    }
  }
  return model;
}

double two_sided_normal_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

std::vector<double> wald_pvalues(const LogisticModel& model) {
  std::vector<double> out(static_cast<std::size_t>(model.weights.size()), 1.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double w = model.weights[static_cast<Eigen::Index>(j)];
    const double se = model.std_errors[static_cast<Eigen::Index>(j)];
    if (w == 0.0 || (j < model.degenerate.size() && model.degenerate[j]) || !std::isfinite(se) || !(se > 0))
      continue;
    out[j] = two_sided_normal_p(w / se);
  }
  return out;
}

double accuracy(const LogisticModel& model, const FeatureTable& table) {
  if (table.rows() == 0) throw EmptyInput("accuracy needs at least one row");
  const Eigen::VectorXd f = model.decision(table.X);
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (f[i] * table.y[i] > 0) ++correct;
  return static_cast<double>(correct) / static_cast<double>(f.size());
}

}  // namespace vibecheck::stats
