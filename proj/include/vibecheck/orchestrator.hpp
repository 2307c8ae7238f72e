#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vibecheck/core.hpp"
#include "vibecheck/discovery.hpp"
#include "vibecheck/gateway/gateway.hpp"
#include "vibecheck/ingest.hpp"
#include "vibecheck/judging.hpp"
#include "vibecheck/stats/logistic.hpp"

namespace vibecheck::orchestrator {

struct RunState {
  /// Discovery passes completed.
  int iteration = 0;
  std::vector<Vibe> vibes;
  /// Training statistics of the accepted vibes, aligned with `vibes`.
  std::vector<VibeStats> stats;
  ScoreMatrix train_matrix;
  ScoreMatrix validation_matrix;
  std::optional<stats::LogisticModel> mm_model;
  std::optional<stats::LogisticModel> pp_model;
  /// Training records with MM decision value <= 0, largest error first.
  std::vector<std::string> misclassified;
  double train_mm_accuracy = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<std::string> sample_ids;
  discovery::DiscoveryResult discovery;
  /// New vibes as scored, with ids assigned.
  std::vector<Vibe> candidates;
  std::vector<VibeStats> candidate_stats;
  std::vector<std::string> accepted;
  judging::ScoringReport scoring;
  bool no_new_vibes = false;
  std::size_t misclassified = 0;
  double train_mm_accuracy = 0.0;
};

/// One discovery pass: sample, propose, consolidate, score the new vibes on
/// the training split, keep those passing the filter, refit and recompute the
/// misclassified set. Pass 0 samples min(d, n) training records uniformly;
/// later passes take the d misclassified records with the largest error.
/// When nothing new is accepted only the iteration counter moves.
RunState run_iteration(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split, RunState state,
                       IterationRecord* record = nullptr);

/// Scores `vibes` on the training split and accepts all of them (used for
/// preset and user-supplied vibes).
RunState accept_vibes(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split,
                      std::vector<Vibe> vibes, judging::ScoringReport* scoring = nullptr);

/// Refits the MM and PP models on the state's training matrix and refreshes
/// per-vibe statistics and the misclassified list.
void refit(RunState& state, const RunConfig& config, const ingest::Split& split);

struct VibeRow {
  Vibe vibe;
  /// Held-out kappa, separability and scored-cell count, with coefficients of
  /// the final training fit.
  VibeStats heldout;
  VibeStats train;
  std::vector<std::string> exemplars_high;  // score +1 (model A higher)
  std::vector<std::string> exemplars_low;   // score -1 (model B higher)
};

struct FinalResult {
  /// LARS entry order over the accepted vibes.
  std::vector<std::string> lars_order;
  /// Selected vibes sorted by held-out |sep| descending.
  std::vector<VibeRow> rows;
  ScoreMatrix train_matrix;
  ScoreMatrix validation_matrix;
  stats::LogisticModel mm_model;
  std::optional<stats::LogisticModel> pp_model;
  double mm_accuracy = 0.0;
  std::optional<double> pp_accuracy;
  double mean_kappa = 0.0;
  double train_mm_accuracy = 0.0;
  std::size_t validation_missing = 0;
  std::size_t train_imputed = 0;
  std::size_t validation_imputed = 0;
  judging::ScoringReport scoring;
};

inline constexpr std::size_t kExemplarsPerDirection = 3;

/// Selects min(num_final_vibes, |vibes|) vibes by LARS on the training MM
/// table, scores the validation split on them, refits MM and PP on training
/// and evaluates on validation. Throws NoVibesSurvived when nothing was
/// accepted.
FinalResult finalize(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split,
                     const RunState& state);

enum class StopReason { IterationLimit, FewMisclassified, NoNewVibes, Preset };

const char* to_string(StopReason r) noexcept;

struct RunOutput {
  std::vector<IterationRecord> iterations;
  RunState state;
  FinalResult final;
  StopReason stop = StopReason::IterationLimit;
  judging::ScoringReport preset_scoring;
};

/// The full loop. Passes continue while fewer than `iterations` have run and
/// more than d training records are misclassified; a pass that accepts nothing
/// ends the loop. With `fixed_vibes` discovery is skipped and those vibes are
/// scored and accepted as given.
RunOutput run_pipeline(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split,
                       std::optional<std::vector<Vibe>> fixed_vibes = std::nullopt);

}  // namespace vibecheck::orchestrator
