#include "vibecheck/stats/metrics.hpp"

#include <cmath>

#include "vibecheck/errors.hpp"
#include "vibecheck/stats/kappa.hpp"

namespace vibecheck::stats {

double sep_score(std::span<const Score> scores) {
  if (scores.empty()) throw EmptyInput("separability needs at least one score");
  long sum = 0;
  for (Score s : scores) sum += s.value();
  return static_cast<double>(sum) / static_cast<double>(scores.size());
}

bool passes_filter(const VibeStats& s, double kappa_min, double sep_min) noexcept {
  return s.kappa >= kappa_min - kFilterSlack && std::fabs(s.sep_score) >= sep_min - kFilterSlack;
}

std::vector<std::string> filter_vibes(std::span<const VibeStats> stats, const RunConfig& config) {
  std::vector<std::string> kept;
  for (const auto& s : stats)
    if (passes_filter(s, config.kappa_min, config.sep_min)) kept.push_back(s.vibe_id);
  return kept;
}

std::vector<VibeStats> describe_vibes(const ScoreMatrix& matrix) {
  std::vector<VibeStats> out;
  for (std::size_t v = 0; v < matrix.vibes().size(); ++v) {
    VibeStats s;
    s.vibe_id = matrix.vibes()[v];
    const auto column = matrix.scored_column(v);
    s.n_scored = column.size();
    s.sep_score = column.empty() ? 0.0 : sep_score(column);
    s.kappa = judge_agreement(matrix, v);
    out.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd score_features(const ScoreMatrix& matrix, std::size_t* imputed) {
  const std::size_t n = matrix.records().size(), k = matrix.vibes().size();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::size_t filled = 0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t v = 0; v < k; ++v) {
      if (auto s = matrix.aggregated(r, v))
        X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(v)) = s->value();
      else
        ++filled;
    }
  if (imputed) *imputed = filled;
  return X;
}

FeatureTable build_mm_features(const ScoreMatrix& matrix) {
  FeatureTable t;
  const Eigen::MatrixXd base = score_features(matrix, &t.imputed);
  const Eigen::Index n = base.rows();
  t.X.resize(2 * n, base.cols());
  t.y.resize(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.X.row(2 * i) = base.row(i);
    t.X.row(2 * i + 1) = -base.row(i);
    t.y[2 * i] = 1.0;
    t.y[2 * i + 1] = -1.0;
  }
  t.columns = matrix.vibes();
  t.row_weight = 0.5;
  return t;
}

FeatureTable build_pp_features(const ScoreMatrix& matrix, std::span<const std::optional<Preference>> preferences) {
  if (preferences.size() != matrix.records().size())
    throw LengthMismatch("preference labels do not align with the score matrix records");
  FeatureTable t;
  std::size_t all_imputed = 0;
  const Eigen::MatrixXd base = score_features(matrix, &all_imputed);
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < preferences.size(); ++i)
    if (preferences[i]) rows.push_back(static_cast<Eigen::Index>(i));
  t.X.resize(static_cast<Eigen::Index>(rows.size()), base.cols());
  t.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t m = 0; m < rows.size(); ++m) {
    const auto i = static_cast<Eigen::Index>(m);
    t.X.row(i) = base.row(rows[m]);
    t.y[i] = preference_label(*preferences[static_cast<std::size_t>(rows[m])]);
    for (std::size_t v = 0; v < matrix.vibes().size(); ++v)
      if (matrix.is_missing(static_cast<std::size_t>(rows[m]), v)) ++t.imputed;
  }
  t.columns = matrix.vibes();
  return t;
}

}  // namespace vibecheck::stats
