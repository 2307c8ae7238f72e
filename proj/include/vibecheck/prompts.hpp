#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/core.hpp"

// Prompt templates for every model call the pipeline makes. Record text is
// wrapped in <tag> blocks so that responses can be audited and so that the
// rule-based mock provider can read the request back.
namespace vibecheck::prompts {

enum class Kind {
  Discovery,
  Iteration,
  Reduction,
  FinalReduction,
  Dedup,
  Ranker,
  Preference,
  Category,
  Unknown,
};

const char* to_string(Kind kind) noexcept;
Kind detect_kind(std::string_view user_prompt);

extern const std::string_view kProposerSystem;
extern const std::string_view kReducerSystem;
extern const std::string_view kRankerSystem;
extern const std::string_view kPreferenceSystem;
extern const std::string_view kCategorySystem;

std::string discovery(std::span<const ComparisonRecord> batch);
std::string iteration(std::span<const ComparisonRecord> batch, std::span<const Vibe> existing);
std::string reduction(std::span<const Vibe> axes);
std::string final_reduction(std::span<const Vibe> axes, std::size_t cap);
std::string dedup(std::span<const Vibe> existing, std::span<const Vibe> fresh);
/// `first` and `second` are the outputs in presentation order.
std::string ranker(const Vibe& vibe, std::string_view prompt, std::string_view first, std::string_view second);
std::string preference(std::string_view prompt, std::string_view first, std::string_view second);
std::string category(std::string_view prompt);

/// Follow-up sent once when a response could not be parsed.
std::string repair(std::string_view original_user, std::string_view previous_response, std::string_view instruction);

extern const std::string_view kAxisFormatRepair;
extern const std::string_view kReduceFormatRepair;
extern const std::string_view kVerdictRepair;

// --- reading requests back ---------------------------------------------------

struct Sample {
  std::string prompt;
  std::string first;
  std::string second;
};

/// Samples embedded in a discovery or iteration prompt.
std::vector<Sample> samples(std::string_view user_prompt);
/// The single sample of a ranker or preference prompt.
std::optional<Sample> pair(std::string_view user_prompt);
/// The rendered axis of a ranker prompt.
std::optional<std::string> ranker_axis(std::string_view user_prompt);
/// Axis lines listed inside a <tag> block ("axes", "existing_axes", "new_axes").
std::vector<std::string> axis_block(std::string_view user_prompt, std::string_view tag);
/// The cap of a final-reduction prompt.
std::optional<std::size_t> final_cap(std::string_view user_prompt);
/// The question of a category prompt.
std::optional<std::string> category_question(std::string_view user_prompt);

}  // namespace vibecheck::prompts
