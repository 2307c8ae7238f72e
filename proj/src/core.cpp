#include "vibecheck/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "vibecheck/errors.hpp"

namespace vibecheck {

ComparisonRecord swapped(const ComparisonRecord& record) {
  ComparisonRecord out = record;
  std::swap(out.output_a, out.output_b);
  if (out.preference) out.preference = *out.preference == Preference::A ? Preference::B : Preference::A;
  return out;
}

Score aggregate_scores(std::span<const Score> per_judge) {
  if (per_judge.empty()) throw std::invalid_argument("aggregate_scores needs at least one judge score");
  int sum = 0;
  for (Score s : per_judge) sum += s.value();
  return Score((sum > 0) - (sum < 0));
}

std::vector<Score> negate_scores(std::span<const Score> scores) {
  std::vector<Score> out;
  out.reserve(scores.size());
  for (Score s : scores) out.push_back(-s);
  return out;
}

std::string Vibe::render() const { return name + ": Low: " + low + "; High: " + high; }

std::string Vibe::render_high_first() const { return name + ": High: " + high + " Low: " + low; }

Vibe make_vibe(std::string name, std::string low, std::string high, VibeOrigin origin, int iteration) {
  if (name.empty()) throw AxisParseError("axis name is empty");
  if (low.empty() || high.empty()) throw AxisParseError("axis \"" + name + "\" has an empty pole description");
  if (low == high) throw AxisParseError("axis \"" + name + "\" has identical low and high descriptions");
  Vibe v;
  v.name = std::move(name);
  v.low = std::move(low);
  v.high = std::move(high);
  v.origin = origin;
  v.iteration = iteration;
  return v;
}

const char* to_string(Decision d) noexcept {
  switch (d) {
    case Decision::FirstHigher: return "first";
    case Decision::SecondHigher: return "second";
    case Decision::NotApplicable: return "n/a";
  }
  return "n/a";
}

// --- ScoreMatrix -------------------------------------------------------------

ScoreMatrix::ScoreMatrix(std::vector<std::string> records, std::vector<std::string> vibes, std::size_t judges)
    : records_(std::move(records)), vibes_(std::move(vibes)), judges_(judges) {
  if (judges_ == 0) throw std::invalid_argument("score matrix needs at least one judge");
  cells_.assign(records_.size() * vibes_.size() * judges_, std::nullopt);
}

std::size_t ScoreMatrix::offset(std::size_t record, std::size_t vibe, std::size_t judge) const {
  if (record >= records_.size() || vibe >= vibes_.size() || judge >= judges_)
    throw std::out_of_range("score matrix index out of range");
  return (record * vibes_.size() + vibe) * judges_ + judge;
}

std::size_t ScoreMatrix::record_index(const std::string& id) const {
  auto it = std::find(records_.begin(), records_.end(), id);
  if (it == records_.end()) throw std::out_of_range("unknown record id " + id);
  return static_cast<std::size_t>(it - records_.begin());
}

std::size_t ScoreMatrix::vibe_index(const std::string& id) const {
  auto it = std::find(vibes_.begin(), vibes_.end(), id);
  if (it == vibes_.end()) throw std::out_of_range("unknown vibe id " + id);
  return static_cast<std::size_t>(it - vibes_.begin());
}

void ScoreMatrix::set(std::size_t record, std::size_t vibe, std::size_t judge, Score score) {
  cells_[offset(record, vibe, judge)] = score;
}

std::optional<Score> ScoreMatrix::judge_score(std::size_t record, std::size_t vibe, std::size_t judge) const {
  return cells_[offset(record, vibe, judge)];
}

std::optional<Score> ScoreMatrix::aggregated(std::size_t record, std::size_t vibe) const {
  std::vector<Score> panel;
  panel.reserve(judges_);
  for (std::size_t j = 0; j < judges_; ++j) {
    auto s = cells_[offset(record, vibe, j)];
    if (!s) return std::nullopt;
    panel.push_back(*s);
  }
  return aggregate_scores(panel);
}

std::size_t ScoreMatrix::missing_count() const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < records_.size(); ++r)
    for (std::size_t v = 0; v < vibes_.size(); ++v) n += is_missing(r, v) ? 1 : 0;
  return n;
}

std::vector<Score> ScoreMatrix::scored_column(std::size_t vibe) const {
  std::vector<Score> out;
  for (std::size_t r = 0; r < records_.size(); ++r)
    if (auto s = aggregated(r, vibe)) out.push_back(*s);
  return out;
}

ScoreMatrix ScoreMatrix::select_vibes(std::span<const std::string> vibe_ids) const {
  ScoreMatrix out(records_, std::vector<std::string>(vibe_ids.begin(), vibe_ids.end()), judges_);
  for (std::size_t v = 0; v < vibe_ids.size(); ++v) {
    std::size_t src = vibe_index(vibe_ids[v]);
    for (std::size_t r = 0; r < records_.size(); ++r)
      for (std::size_t j = 0; j < judges_; ++j) out.cells_[out.offset(r, v, j)] = cells_[offset(r, src, j)];
  }
  return out;
}

ScoreMatrix ScoreMatrix::with_columns(const ScoreMatrix& other) const {
  if (vibes_.empty() && records_.empty()) return other;
  if (other.records_ != records_) throw std::invalid_argument("cannot join score matrices over different records");
  if (other.judges_ != judges_) throw std::invalid_argument("cannot join score matrices with different panels");
  std::unordered_set<std::string> seen(vibes_.begin(), vibes_.end());
  for (const auto& id : other.vibes_)
    if (seen.count(id)) throw std::invalid_argument("vibe " + id + " already present in score matrix");

  std::vector<std::string> vibes = vibes_;
  vibes.insert(vibes.end(), other.vibes_.begin(), other.vibes_.end());
  ScoreMatrix out(records_, std::move(vibes), judges_);
  for (std::size_t r = 0; r < records_.size(); ++r) {
    for (std::size_t j = 0; j < judges_; ++j) {
      for (std::size_t v = 0; v < vibes_.size(); ++v) out.cells_[out.offset(r, v, j)] = cells_[offset(r, v, j)];
      for (std::size_t v = 0; v < other.vibes_.size(); ++v)
        out.cells_[out.offset(r, vibes_.size() + v, j)] = other.cells_[other.offset(r, v, j)];
    }
  }
  return out;
}

ScoreMatrix ScoreMatrix::negated() const {
  ScoreMatrix out = *this;
  for (auto& c : out.cells_)
    if (c) c = -*c;
  return out;
}

// --- RunConfig ---------------------------------------------------------------

void RunConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
  };
  positive(d, "d");
  positive(batch, "batch");
  positive(iterations, "iterations");
  positive(num_eval_vibes, "num_eval_vibes");
  positive(num_final_vibes, "num_final_vibes");
  positive(concurrency, "concurrency");
  if (judge_models.size() != 2) throw ConfigError("exactly two judge models are required");
  if (preference_judge_models.size() != 2) throw ConfigError("exactly two preference judge models are required");
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
  };
  unit(kappa_min, "kappa_min");
  unit(sep_min, "sep_min");
  unit(max_missing_fraction, "max_missing_fraction");
  unit(cluster_threshold, "cluster_threshold");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0,1)");
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) throw ConfigError("l2_lambda must be a finite value >= 0");
  if (proposer_model.empty() || embed_model.empty()) throw ConfigError("model identifiers must be non-empty");
  for (const auto& m : judge_models)
    if (m.empty()) throw ConfigError("judge model identifiers must be non-empty");
}

}  // namespace vibecheck
