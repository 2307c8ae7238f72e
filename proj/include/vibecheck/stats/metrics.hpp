#pragma once

#include <span>
#include <string>
#include <vector>

#include "vibecheck/core.hpp"
#include "vibecheck/stats/logistic.hpp"

namespace vibecheck::stats {

/// Mean of the scores. Throws EmptyInput.
double sep_score(std::span<const Score> scores);

/// Slack applied at the filter boundaries so that thresholds reached exactly
/// in decimal survive binary rounding.
inline constexpr double kFilterSlack = 1e-12;

/// Kept iff kappa >= kappa_min and |sep| >= sep_min.
bool passes_filter(const VibeStats& s, double kappa_min, double sep_min) noexcept;

std::vector<std::string> filter_vibes(std::span<const VibeStats> stats, const RunConfig& config);

/// Kappa, separability and scored-cell count for every vibe column.
std::vector<VibeStats> describe_vibes(const ScoreMatrix& matrix);

/// Aggregated scores as an n-by-k matrix; missing cells become 0 and are
/// counted through `imputed`.
Eigen::MatrixXd score_features(const ScoreMatrix& matrix, std::size_t* imputed = nullptr);

/// Order-augmented model-matching table: record i yields rows 2i = (v, +1)
/// and 2i+1 = (-v, -1).
FeatureTable build_mm_features(const ScoreMatrix& matrix);

/// Preference table over the labeled records (label +1 for A). `preferences`
/// is aligned with the matrix records; unlabeled entries are skipped.
FeatureTable build_pp_features(const ScoreMatrix& matrix, std::span<const std::optional<Preference>> preferences);

}  // namespace vibecheck::stats
