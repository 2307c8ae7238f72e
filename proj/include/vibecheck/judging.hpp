#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/core.hpp"
#include "vibecheck/gateway/gateway.hpp"

namespace vibecheck::judging {

/// Reads the final answer designator of a judge response.
///
/// The last occurrence of "Model: A", "Model: B", "Model: tie" or a standalone
/// "N/A" wins (any case, quotes and markdown emphasis allowed). A response
/// that is nothing but "A" or "B" is accepted too. Ties and N/A both map to
/// NotApplicable. Throws UnparseableVerdict otherwise.
JudgeVerdict parse_verdict(std::string_view response);

enum class Ordering { AB, BA };

const char* to_string(Ordering o) noexcept;

/// The model a single presentation names: +1 for A, -1 for B, 0 for none.
int named_model(Ordering ordering, Decision decision) noexcept;

/// Combines one judge's two presentations into its cell score: +1 when both
/// name A, -1 when both name B, 0 otherwise.
Score debias(Decision ab, Decision ba) noexcept;

/// Outcome of one judge call (one ordering of one cell).
struct CallAudit {
  std::string record_id;
  std::string vibe_id;
  std::string judge;
  Ordering ordering = Ordering::AB;
  std::optional<Decision> decision;  // nullopt: provider failure
  std::string rationale_digest;
  bool repaired = false;
  bool unparseable = false;
  std::string error;
};

/// Asks `judge` once for one presentation of a pair, with one repair turn when
/// the answer cannot be parsed. Unparseable after repair counts as
/// NotApplicable. Provider errors propagate.
Decision judge_presentation(gateway::Gateway& gateway, const std::string& judge, const Vibe& vibe,
                            std::string_view prompt, std::string_view first, std::string_view second,
                            CallAudit* audit = nullptr);

/// Both presentations of one cell for one judge, debiased.
Score judge_cell(gateway::Gateway& gateway, const ComparisonRecord& record, const Vibe& vibe,
                 const std::string& judge);

struct ScoringOptions {
  std::size_t workers = 8;
  double max_missing_fraction = 0.1;
};

struct ScoringReport {
  std::vector<CallAudit> calls;  // task order: record, vibe, judge, ordering
  std::size_t unparseable = 0;
  std::size_t repaired = 0;
  std::size_t failed_calls = 0;
  std::size_t missing_cells = 0;
};

/// Scores every (record, vibe) cell with every judge in both orderings.
///
/// A cell whose judge call failed is left missing in the matrix. Throws
/// DataQualityError when the missing fraction exceeds the configured bound;
/// AuthError and ConfigError abort immediately.
ScoreMatrix score_dataset(gateway::Gateway& gateway, std::span<const ComparisonRecord> records,
                          std::span<const Vibe> vibes, std::span<const std::string> judges,
                          const ScoringOptions& options = {}, ScoringReport* report = nullptr);

}  // namespace vibecheck::judging
