#include "vibecheck/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <spdlog/spdlog.h>

#include "vibecheck/errors.hpp"
#include "vibecheck/random.hpp"
#include "vibecheck/stats/lars.hpp"
#include "vibecheck/stats/metrics.hpp"

namespace vibecheck::orchestrator {

namespace {

constexpr std::uint64_t kSampleSalt = 0x73616d706c65ULL;
constexpr std::uint64_t kMisclassifiedSalt = 0x6d697363ULL;

judging::ScoringOptions scoring_options(const gateway::Gateway& gateway, const RunConfig& config) {
  return {gateway.concurrency(), config.max_missing_fraction};
}

std::vector<std::optional<Preference>> preferences_of(const ingest::Dataset& data) {
  std::vector<std::optional<Preference>> out;
  out.reserve(data.records.size());
  for (const auto& r : data.records) out.push_back(r.preference);
  return out;
}

// A PP fit needs at least two labeled rows of both classes.
std::optional<stats::LogisticModel> fit_pp(const stats::FeatureTable& table, double lambda) {
  if (table.rows() < 2) return std::nullopt;
  try {
    return stats::fit_logistic(table, lambda, true);
  } catch (const SingleClass&) {
    return std::nullopt;
  }
}

void attach_coefficients(std::vector<VibeStats>& rows, const stats::LogisticModel& mm,
                         const std::optional<stats::LogisticModel>& pp) {
  const auto mm_p = stats::wald_pvalues(mm);
  std::vector<double> pp_p;
  if (pp) pp_p = stats::wald_pvalues(*pp);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    rows[j].mm_coef = mm.weights[idx];
    rows[j].mm_pvalue = mm_p[j];
    if (pp) {
      rows[j].pp_coef = pp->weights[idx];
      rows[j].pp_pvalue = pp_p[j];
    } else {
      rows[j].pp_coef.reset();
      rows[j].pp_pvalue.reset();
    }
  }
}

std::vector<std::string> sample_ids(const ingest::Dataset& train, const RunState& state, const RunConfig& config,
                                    int iteration) {
  std::vector<std::string> ids;
  if (state.vibes.empty()) {
    auto rng = stream(config.seed, kSampleSalt + static_cast<std::uint64_t>(iteration));
    const auto order = permutation(train.records.size(), rng);
    const std::size_t m = std::min(config.d, train.records.size());
    for (std::size_t i = 0; i < m; ++i) ids.push_back(train.records[order[i]].id);
  } else {
    const std::size_t m = std::min(config.d, state.misclassified.size());
    ids.assign(state.misclassified.begin(), state.misclassified.begin() + static_cast<std::ptrdiff_t>(m));
  }
  return ids;
}

std::vector<ComparisonRecord> lookup(const ingest::Dataset& data, const std::vector<std::string>& ids) {
  std::map<std::string, const ComparisonRecord*> index;
  for (const auto& r : data.records) index[r.id] = &r;
  std::vector<ComparisonRecord> out;
  for (const auto& id : ids) out.push_back(*index.at(id));
  return out;
}

int agreement_strength(const ScoreMatrix& m, std::size_t r, std::size_t v) {
  int sum = 0;
  for (std::size_t j = 0; j < m.judge_count(); ++j)
    if (auto s = m.judge_score(r, v, j)) sum += s->value();
  return std::abs(sum);
}

void pick_exemplars(const ScoreMatrix& m, std::size_t v, VibeRow& row) {
  std::vector<std::size_t> high, low;
  for (std::size_t r = 0; r < m.records().size(); ++r) {
    auto s = m.aggregated(r, v);
    if (!s || s->value() == 0) continue;
    (s->value() > 0 ? high : low).push_back(r);
  }
  auto take = [&](std::vector<std::size_t>& rows, std::vector<std::string>& out) {
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return agreement_strength(m, a, v) > agreement_strength(m, b, v);
    });
    for (std::size_t i = 0; i < rows.size() && i < kExemplarsPerDirection; ++i) out.push_back(m.records()[rows[i]]);
  };
  take(high, row.exemplars_high);
  take(low, row.exemplars_low);
}

}  // namespace

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::IterationLimit: return "iteration_limit";
    case StopReason::FewMisclassified: return "few_misclassified";
    case StopReason::NoNewVibes: return "no_new_vibes";
    case StopReason::Preset: return "fixed_vibes";
  }
  return "iteration_limit";
}

void refit(RunState& state, const RunConfig& config, const ingest::Split& split) {
  state.stats = stats::describe_vibes(state.train_matrix);
  const stats::FeatureTable mm_table = stats::build_mm_features(state.train_matrix);
  state.mm_model = stats::fit_logistic(mm_table, config.l2_lambda, false);
  if (!state.mm_model->converged)
    spdlog::warn("model-matching fit stopped after {} iterations with gradient norm {:.3g}",
                 state.mm_model->iterations, state.mm_model->gradient_norm);
  state.train_mm_accuracy = stats::accuracy(*state.mm_model, mm_table);

  const auto prefs = preferences_of(split.train);
  state.pp_model = fit_pp(stats::build_pp_features(state.train_matrix, prefs), config.l2_lambda);
  attach_coefficients(state.stats, *state.mm_model, state.pp_model);

  // Unaugmented rows present model A first, so the correct sign is positive.
  const Eigen::MatrixXd X = stats::score_features(state.train_matrix);
  const Eigen::VectorXd f = state.mm_model->decision(X);
  auto rng = stream(config.seed, kMisclassifiedSalt + static_cast<std::uint64_t>(state.iteration));
  const auto tiebreak = permutation(static_cast<std::size_t>(f.size()), rng);
  std::vector<std::size_t> wrong;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (f[i] <= 0) wrong.push_back(static_cast<std::size_t>(i));
  std::sort(wrong.begin(), wrong.end(), [&](std::size_t a, std::size_t b) {
    const double fa = f[static_cast<Eigen::Index>(a)], fb = f[static_cast<Eigen::Index>(b)];
    if (fa != fb) return fa < fb;
    return tiebreak[a] < tiebreak[b];
  });
  state.misclassified.clear();
  for (std::size_t i : wrong) state.misclassified.push_back(state.train_matrix.records()[i]);
}

RunState run_iteration(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split, RunState state,
                       IterationRecord* record) {
  IterationRecord local;
  IterationRecord& rec = record ? *record : local;
  rec = IterationRecord{};
  const int it = state.iteration;
  rec.iteration = it;

  rec.sample_ids = sample_ids(split.train, state, config, it);
  const auto sample = lookup(split.train, rec.sample_ids);
  spdlog::info("iteration {}: discovering on {} records", it, sample.size());
  rec.discovery = discovery::discover(gateway, config, sample, state.vibes);

  for (std::size_t k = 0; k < rec.discovery.vibes.size(); ++k) {
    Vibe v = rec.discovery.vibes[k];
    v.id = "it" + std::to_string(it) + "_v" + std::to_string(k);
    v.origin = VibeOrigin::Discovered;
    v.iteration = it;
    rec.candidates.push_back(std::move(v));
  }

  auto finish_without_change = [&] {
    rec.no_new_vibes = true;
    rec.misclassified = state.misclassified.size();
    rec.train_mm_accuracy = state.train_mm_accuracy;
    state.iteration = it + 1;
    spdlog::info("iteration {}: no new vibe accepted", it);
    return state;
  };
  if (rec.candidates.empty()) return finish_without_change();

  const ScoreMatrix scored = judging::score_dataset(gateway, split.train.records, rec.candidates, config.judge_models,
                                                    scoring_options(gateway, config), &rec.scoring);
  rec.candidate_stats = stats::describe_vibes(scored);
  rec.accepted = stats::filter_vibes(rec.candidate_stats, config);
  for (const auto& s : rec.candidate_stats)
    spdlog::info("  {}: kappa {:.3f}, sep {:+.3f}{}", s.vibe_id, s.kappa, s.sep_score,
                 std::find(rec.accepted.begin(), rec.accepted.end(), s.vibe_id) != rec.accepted.end() ? "" : " (dropped)");
  if (rec.accepted.empty()) return finish_without_change();

  const ScoreMatrix kept = scored.select_vibes(rec.accepted);
  state.train_matrix = state.vibes.empty() ? kept : state.train_matrix.with_columns(kept);
  for (const auto& v : rec.candidates)
    if (std::find(rec.accepted.begin(), rec.accepted.end(), v.id) != rec.accepted.end()) state.vibes.push_back(v);

  refit(state, config, split);
  state.iteration = it + 1;
  rec.misclassified = state.misclassified.size();
  rec.train_mm_accuracy = state.train_mm_accuracy;
  spdlog::info("iteration {}: {} vibes, training MM accuracy {:.3f}, {} misclassified", it, state.vibes.size(),
               state.train_mm_accuracy, state.misclassified.size());
  return state;
}

RunState accept_vibes(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split,
                      std::vector<Vibe> vibes, judging::ScoringReport* scoring) {
  if (vibes.empty()) throw ConfigError("no vibes to score");
  RunState state;
  state.train_matrix = judging::score_dataset(gateway, split.train.records, vibes, config.judge_models,
                                              scoring_options(gateway, config), scoring);
  state.vibes = std::move(vibes);
  refit(state, config, split);
  return state;
}

FinalResult finalize(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split,
                     const RunState& state) {
  if (state.vibes.empty()) throw NoVibesSurvived();
  FinalResult out;

  const std::size_t k = std::min(config.num_final_vibes, state.vibes.size());
  out.lars_order = stats::lars_order(stats::build_mm_features(state.train_matrix), k);

  std::vector<Vibe> selected;
  for (const auto& id : out.lars_order)
    for (const auto& v : state.vibes)
      if (v.id == id) selected.push_back(v);

  out.train_matrix = state.train_matrix.select_vibes(out.lars_order);
  out.validation_matrix = judging::score_dataset(gateway, split.validation.records, selected, config.judge_models,
                                                 scoring_options(gateway, config), &out.scoring);
  out.validation_missing = out.validation_matrix.missing_count();

  const stats::FeatureTable mm_train = stats::build_mm_features(out.train_matrix);
  const stats::FeatureTable mm_val = stats::build_mm_features(out.validation_matrix);
  out.train_imputed = mm_train.imputed;
  out.validation_imputed = mm_val.imputed;
  out.mm_model = stats::fit_logistic(mm_train, config.l2_lambda, false);
  out.train_mm_accuracy = stats::accuracy(out.mm_model, mm_train);
  out.mm_accuracy = stats::accuracy(out.mm_model, mm_val);

  out.pp_model = fit_pp(stats::build_pp_features(out.train_matrix, preferences_of(split.train)), config.l2_lambda);
  const stats::FeatureTable pp_val =
      stats::build_pp_features(out.validation_matrix, preferences_of(split.validation));
  if (out.pp_model && pp_val.rows() > 0) out.pp_accuracy = stats::accuracy(*out.pp_model, pp_val);

  std::vector<VibeStats> heldout = stats::describe_vibes(out.validation_matrix);
  std::vector<VibeStats> train = stats::describe_vibes(out.train_matrix);
  attach_coefficients(heldout, out.mm_model, out.pp_model);
  attach_coefficients(train, out.mm_model, out.pp_model);

  double kappa_sum = 0.0;
  for (std::size_t j = 0; j < selected.size(); ++j) {
    VibeRow row;
    row.vibe = selected[j];
    row.heldout = heldout[j];
    row.train = train[j];
    pick_exemplars(out.validation_matrix, j, row);
    kappa_sum += heldout[j].kappa;
    out.rows.push_back(std::move(row));
  }
  out.mean_kappa = kappa_sum / static_cast<double>(selected.size());
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const VibeRow& a, const VibeRow& b) {
    return std::fabs(a.heldout.sep_score) > std::fabs(b.heldout.sep_score);
  });
  return out;
}

RunOutput run_pipeline(gateway::Gateway& gateway, const RunConfig& config, const ingest::Split& split,
                       std::optional<std::vector<Vibe>> fixed_vibes) {
  config.validate();
  RunOutput out;
  if (fixed_vibes) {
    out.state = accept_vibes(gateway, config, split, std::move(*fixed_vibes), &out.preset_scoring);
    out.stop = StopReason::Preset;
  } else {
    out.stop = StopReason::IterationLimit;
    for (std::size_t pass = 0; pass < config.iterations; ++pass) {
      if (pass > 0 && !out.state.vibes.empty() && out.state.misclassified.size() <= config.d) {
        out.stop = StopReason::FewMisclassified;
        break;
      }
      IterationRecord rec;
      out.state = run_iteration(gateway, config, split, std::move(out.state), &rec);
      const bool stalled = rec.no_new_vibes;
      out.iterations.push_back(std::move(rec));
      if (stalled) {
        out.stop = StopReason::NoNewVibes;
        break;
      }
    }
  }
  out.final = finalize(gateway, config, split, out.state);
  return out;
}

}  // namespace vibecheck::orchestrator
