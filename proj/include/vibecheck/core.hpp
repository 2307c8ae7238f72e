#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vibecheck {

/// Which model's output the user preferred. Ties are never stored.
enum class Preference { A, B };

/// +1 for A, -1 for B.
constexpr int preference_label(Preference p) noexcept { return p == Preference::A ? 1 : -1; }

struct ComparisonRecord {
  std::string id;
  std::string prompt;
  std::string output_a;
  std::string output_b;
  std::optional<Preference> preference;
  std::optional<std::string> topic;
  std::map<std::string, std::string> meta;

  friend bool operator==(const ComparisonRecord&, const ComparisonRecord&) = default;
};

/// The same record with the two outputs (and the preference) exchanged.
ComparisonRecord swapped(const ComparisonRecord& record);

/// A judge score for one (record, vibe) cell.
///
/// +1: model A sits higher on the vibe; -1: model B does; 0: tie, not
/// applicable, or the judge's answer depended on presentation order.
class Score {
 public:
  constexpr Score() noexcept = default;
  constexpr explicit Score(int value) : value_(checked(value)) {}

  static constexpr Score a_higher() { return Score(1); }
  static constexpr Score b_higher() { return Score(-1); }
  static constexpr Score tie() { return Score(); }

  constexpr int value() const noexcept { return value_; }
  constexpr Score operator-() const { return Score(-value_); }
  friend constexpr bool operator==(Score, Score) noexcept = default;

 private:
  static constexpr std::int8_t checked(int value) {
    if (value < -1 || value > 1) throw std::invalid_argument("score outside {-1,0,1}");
    return static_cast<std::int8_t>(value);
  }

  std::int8_t value_ = 0;
};

/// Panel aggregation: average the judges' scores and round halves away from
/// zero, which for values in {-1,0,1} is the sign of the sum.
Score aggregate_scores(std::span<const Score> per_judge);

std::vector<Score> negate_scores(std::span<const Score> scores);

enum class VibeOrigin { Discovered, Preset };

/// A named axis with textual definitions of its two poles.
struct Vibe {
  std::string id;
  std::string name;
  std::string low;
  std::string high;
  VibeOrigin origin = VibeOrigin::Discovered;
  int iteration = 0;

  /// "{name}: Low: {low}; High: {high}" -- the form shown to judges.
  std::string render() const;
  /// "{name}: High: {high} Low: {low}" -- the form used by reduction prompts.
  std::string render_high_first() const;

  friend bool operator==(const Vibe&, const Vibe&) = default;
};

/// Builds a vibe and enforces its invariants (non-empty fields, distinct
/// poles). Throws AxisParseError.
Vibe make_vibe(std::string name, std::string low, std::string high,
               VibeOrigin origin = VibeOrigin::Discovered, int iteration = 0);

/// One judge's reading of a single presentation of an output pair.
enum class Decision { FirstHigher, SecondHigher, NotApplicable };

struct JudgeVerdict {
  Decision decision = Decision::NotApplicable;
  std::string rationale;
  std::string raw_response;
};

const char* to_string(Decision d) noexcept;

/// Per-judge scores for every (record, vibe) cell, plus the panel aggregate.
///
/// The aggregate of a cell is derived from the per-judge cells on demand, so
/// it exists exactly when every judge's cell exists.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> records, std::vector<std::string> vibes, std::size_t judges = 2);

  const std::vector<std::string>& records() const noexcept { return records_; }
  const std::vector<std::string>& vibes() const noexcept { return vibes_; }
  std::size_t judge_count() const noexcept { return judges_; }

  std::size_t record_index(const std::string& id) const;
  std::size_t vibe_index(const std::string& id) const;

  void set(std::size_t record, std::size_t vibe, std::size_t judge, Score score);
  std::optional<Score> judge_score(std::size_t record, std::size_t vibe, std::size_t judge) const;
  std::optional<Score> aggregated(std::size_t record, std::size_t vibe) const;
  bool is_missing(std::size_t record, std::size_t vibe) const { return !aggregated(record, vibe); }
  std::size_t missing_count() const;
  std::size_t cell_count() const noexcept { return records_.size() * vibes_.size(); }

  /// Aggregated scores of the scored cells of one vibe, in record order.
  std::vector<Score> scored_column(std::size_t vibe) const;

  ScoreMatrix select_vibes(std::span<const std::string> vibe_ids) const;
  /// Columns of `other` appended; both matrices must cover the same records.
  ScoreMatrix with_columns(const ScoreMatrix& other) const;
  ScoreMatrix negated() const;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t offset(std::size_t record, std::size_t vibe, std::size_t judge) const;

  std::vector<std::string> records_;
  std::vector<std::string> vibes_;
  std::size_t judges_ = 2;
  // Dense (record, vibe, judge) storage; nullopt marks a failed cell.
  std::vector<std::optional<Score>> cells_;
};

struct VibeStats {
  std::string vibe_id;
  double kappa = 0.0;
  double sep_score = 0.0;
  double mm_coef = 0.0;
  double mm_pvalue = 1.0;
  std::optional<double> pp_coef;
  std::optional<double> pp_pvalue;
  std::size_t n_scored = 0;
};

/// Pipeline hyperparameters. Defaults follow the published setup.
struct RunConfig {
  std::size_t d = 20;
  std::size_t batch = 5;
  std::size_t iterations = 3;
  std::size_t num_eval_vibes = 10;
  std::size_t num_final_vibes = 10;
  double kappa_min = 0.2;
  double sep_min = 0.05;

  std::string proposer_model = "openai/gpt-4o";
  std::vector<std::string> judge_models = {"openai/gpt-4o-mini", "openrouter/meta-llama/llama-3-70b-instruct"};
  std::string embed_model = "openai/text-embedding-3-small";
  std::vector<std::string> preference_judge_models = {"openai/gpt-4o", "anthropic/claude-3-5-sonnet-20240620"};
  std::string classifier_model = "openai/gpt-4o-mini";

  double proposer_temperature = 0.7;
  double cluster_threshold = 0.3;
  double max_missing_fraction = 0.1;
  double train_fraction = 0.5;
  std::uint64_t seed = 0;
  std::size_t concurrency = 8;
  double l2_lambda = 1e-3;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

}  // namespace vibecheck
