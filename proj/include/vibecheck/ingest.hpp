#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/core.hpp"
#include "vibecheck/gateway/gateway.hpp"

namespace vibecheck::ingest {

struct Dataset {
  std::vector<ComparisonRecord> records;
  std::string model_a_name = "model_a";
  std::string model_b_name = "model_b";

  /// True iff the dataset is non-empty and every record carries a preference.
  bool labeled() const noexcept;
  std::size_t labeled_count() const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t ties_dropped = 0;
};

/// Parses line-delimited records.
///
/// Each non-blank line is a JSON object with string fields id, prompt,
/// output_a and output_b, plus optional preference ("A", "B" or "tie", any
/// case), topic and meta (object of strings). An optional first line
/// {"schema_version": 1, "model_a": ..., "model_b": ...} names the models.
/// Records whose preference is a tie are dropped and counted.
Dataset parse_dataset(std::string_view body, LoadReport* report = nullptr);
Dataset load_dataset(const std::filesystem::path& path, LoadReport* report = nullptr);

/// The format read by parse_dataset; the header line is always written.
std::string serialize_dataset(const Dataset& data);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

struct Split {
  Dataset train;
  Dataset validation;
};

/// Seeded split into train and validation, stratified by preference label
/// (labeled A, labeled B, unlabeled). Each stratum sends round(fraction * n)
/// records to train with largest-remainder rounding so the total honours the
/// fraction to within one record. Both sides are non-empty. Records keep their
/// input order inside each side.
Split split_dataset(const Dataset& data, double fraction, std::uint64_t seed);

// --- preference labeling -----------------------------------------------------

enum class Vote { A, B, Tie };

const char* to_string(Vote v) noexcept;

/// One judge's vote from its two presentations: the named model when both
/// orderings agree on it, Tie otherwise.
Vote judge_vote(Decision ab, Decision ba) noexcept;

/// The ensemble label: a preference only when both judges cast the same
/// non-tie vote.
std::optional<Preference> ensemble_label(Vote first, Vote second) noexcept;

struct LabelReport {
  std::size_t judged = 0;
  std::size_t labeled = 0;
  std::size_t dropped_tie = 0;       // at least one judge voted tie
  std::size_t dropped_conflict = 0;  // the judges named different models
  std::size_t unparseable = 0;
  /// Per record: the two judges' votes, in input order.
  std::vector<std::pair<Vote, Vote>> votes;
};

/// Labels every record with the preference-judge ensemble and drops the rest.
/// Existing labels are overwritten. ProviderError propagates.
Dataset generate_preferences(const Dataset& data, gateway::Gateway& gateway, const RunConfig& config,
                             LabelReport* report = nullptr);

// --- topics ------------------------------------------------------------------

inline constexpr std::string_view kTopics[] = {"stem", "writing", "other"};

/// Reads "Category: STEM|Writing|Other" from a classifier response; anything
/// unrecognised is "other".
std::string parse_category(std::string_view response);

/// Tags every record's topic with the classifier model.
Dataset categorize_prompts(const Dataset& data, gateway::Gateway& gateway, const RunConfig& config);

/// Records whose topic equals `topic`; "all" keeps everything.
Dataset filter_topic(const Dataset& data, std::string_view topic);

}  // namespace vibecheck::ingest
