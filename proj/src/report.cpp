#include "vibecheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>

#include "vibecheck/errors.hpp"
#include "vibecheck/text.hpp"

namespace vibecheck::report {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kExcerptBytes = 160;

const char* origin_name(VibeOrigin o) { return o == VibeOrigin::Preset ? "preset" : "discovered"; }

Row make_row(const orchestrator::VibeRow& v, const std::map<std::string, const ComparisonRecord*>& records) {
  Row r;
  r.vibe_id = v.vibe.id;
  r.name = v.vibe.name;
  r.low = v.vibe.low;
  r.high = v.vibe.high;
  r.origin = origin_name(v.vibe.origin);
  r.iteration = v.vibe.iteration;
  r.kappa = v.heldout.kappa;
  r.sep = v.heldout.sep_score;
  r.n_scored = v.heldout.n_scored;
  r.train_kappa = v.train.kappa;
  r.train_sep = v.train.sep_score;
  r.mm_coef = v.heldout.mm_coef;
  r.mm_pvalue = v.heldout.mm_pvalue;
  r.pp_coef = v.heldout.pp_coef;
  r.pp_pvalue = v.heldout.pp_pvalue;
  auto exemplar = [&](const std::string& id) {
    Exemplar e;
    e.record_id = id;
    if (auto it = records.find(id); it != records.end()) {
      e.prompt = text::excerpt(it->second->prompt, kExcerptBytes);
      e.output_a = text::excerpt(it->second->output_a, kExcerptBytes);
      e.output_b = text::excerpt(it->second->output_b, kExcerptBytes);
    }
    return e;
  };
  for (const auto& id : v.exemplars_high) r.high_exemplars.push_back(exemplar(id));
  for (const auto& id : v.exemplars_low) r.low_exemplars.push_back(exemplar(id));
  return r;
}

ordered_json exemplar_json(const Exemplar& e) {
  ordered_json j;
  j["record_id"] = e.record_id;
  j["prompt"] = e.prompt;
  j["output_a"] = e.output_a;
  j["output_b"] = e.output_b;
  return j;
}

Exemplar exemplar_from(const json& j) {
  return {j.at("record_id").get<std::string>(), j.at("prompt").get<std::string>(),
          j.at("output_a").get<std::string>(), j.at("output_b").get<std::string>()};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

// Markdown table cells cannot hold pipes or newlines.
std::string cell(std::string_view s) {
  std::string out = text::collapse_whitespace(s);
  return text::replace_all(std::move(out), "|", "\\|");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pvalue(double p) {
  if (p < 1e-4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1e", p);
    return buf;
  }
  return fixed(p, 4);
}

std::string signed_fixed(double v, int digits) {
  std::string s = fixed(v, digits);
  if (v >= 0 && s.front() != '-') s.insert(s.begin(), '+');
  if (s == "-0.000" || s == "-0.0000") s[0] = '+';
  return s;
}

class JsonLines {
 public:
  void add(const ordered_json& j) {
    body_ += j.dump();
    body_ += '\n';
  }
  const std::string& body() const { return body_; }

 private:
  std::string body_;
};

std::string judgments_body(const judging::ScoringReport& scoring) {
  JsonLines out;
  for (const auto& c : scoring.calls) {
    ordered_json j;
    j["record_id"] = c.record_id;
    j["vibe_id"] = c.vibe_id;
    j["judge"] = c.judge;
    j["ordering"] = judging::to_string(c.ordering);
    j["verdict"] = c.decision ? json(to_string(*c.decision)) : json(nullptr);
    j["rationale_digest"] = c.rationale_digest;
    j["repaired"] = c.repaired;
    j["unparseable"] = c.unparseable;
    if (!c.error.empty()) j["error"] = c.error;
    out.add(j);
  }
  return out.body();
}

ordered_json vibe_json(const Vibe& v) {
  ordered_json j;
  j["id"] = v.id;
  j["name"] = v.name;
  j["low"] = v.low;
  j["high"] = v.high;
  j["origin"] = origin_name(v.origin);
  j["iteration"] = v.iteration;
  j["axis"] = v.render();
  return j;
}

ordered_json stats_json(const VibeStats& s) {
  ordered_json j;
  j["kappa"] = s.kappa;
  j["sep"] = s.sep_score;
  j["n_scored"] = s.n_scored;
  j["mm_coef"] = s.mm_coef;
  j["mm_pvalue"] = s.mm_pvalue;
  j["pp_coef"] = optional_json(s.pp_coef);
  j["pp_pvalue"] = optional_json(s.pp_pvalue);
  return j;
}

void write_iteration(const std::filesystem::path& dir, const orchestrator::IterationRecord& rec) {
  std::filesystem::create_directories(dir);
  const auto& d = rec.discovery;

  JsonLines sample;
  for (const auto& id : rec.sample_ids) sample.add(ordered_json{{"record_id", id}});
  write_text(dir / "sample.jsonl", sample.body());

  JsonLines proposals, pool;
  std::size_t index = 0;
  for (const auto& p : d.proposals) {
    ordered_json j;
    j["batch"] = p.batch;
    j["repaired"] = p.repaired;
    j["response"] = p.response;
    ordered_json axes = ordered_json::array();
    for (const auto& line : p.lines) axes.push_back(line.text);
    j["axes"] = axes;
    j["rejected"] = p.rejected;
    proposals.add(j);
    for (const auto& line : p.lines) pool.add(ordered_json{{"index", index++}, {"batch", line.source_batch}, {"axis", line.text}});
  }
  write_text(dir / "proposals.jsonl", proposals.body());
  write_text(dir / "pool.jsonl", pool.body());

  JsonLines clusters;
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    ordered_json j;
    j["cluster"] = c;
    j["size"] = d.clusters[c].members.size();
    j["representative"] = d.pool[d.clusters[c].representative].render();
    ordered_json members = ordered_json::array();
    for (std::size_t m : d.clusters[c].members) members.push_back(d.pool[m].render());
    j["members"] = members;
    clusters.add(j);
  }
  write_text(dir / "clusters.jsonl", clusters.body());

  JsonLines reduce;
  if (!d.reduce_audit.reduction_response.empty())
    reduce.add(ordered_json{{"stage", "reduction"}, {"response", d.reduce_audit.reduction_response}});
  if (d.reduce_audit.used_final)
    reduce.add(ordered_json{{"stage", "final_reduction"}, {"response", d.reduce_audit.final_response}});
  if (d.reduce_audit.fell_back) reduce.add(ordered_json{{"stage", "fallback"}, {"response", ""}});
  write_text(dir / "reduce.jsonl", reduce.body());

  JsonLines reduced;
  for (const auto& v : d.reduced) reduced.add(ordered_json{{"axis", v.render()}});
  write_text(dir / "reduced.jsonl", reduced.body());

  JsonLines vibes;
  for (std::size_t i = 0; i < rec.candidates.size(); ++i) {
    ordered_json j = vibe_json(rec.candidates[i]);
    if (i < rec.candidate_stats.size()) {
      j["kappa"] = rec.candidate_stats[i].kappa;
      j["sep"] = rec.candidate_stats[i].sep_score;
      j["n_scored"] = rec.candidate_stats[i].n_scored;
    }
    j["accepted"] = std::find(rec.accepted.begin(), rec.accepted.end(), rec.candidates[i].id) != rec.accepted.end();
    vibes.add(j);
  }
  write_text(dir / "vibes.jsonl", vibes.body());
  write_text(dir / "judgments.jsonl", judgments_body(rec.scoring));
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Report build_report(const orchestrator::RunOutput& run, const ingest::Split& split) {
  Report r;
  r.model_a = split.train.model_a_name;
  r.model_b = split.train.model_b_name;
  std::map<std::string, const ComparisonRecord*> records;
  for (const auto& rec : split.validation.records) records[rec.id] = &rec;

  const auto& f = run.final;
  for (const auto& row : f.rows) r.rows.push_back(make_row(row, records));
  r.lars_order = f.lars_order;
  r.mm_accuracy = f.mm_accuracy;
  r.pp_accuracy = f.pp_accuracy;
  r.mean_kappa = f.mean_kappa;
  r.train_mm_accuracy = f.train_mm_accuracy;
  r.n_train = split.train.records.size();
  r.n_validation = split.validation.records.size();
  r.labeled_train = split.train.labeled_count();
  r.labeled_validation = split.validation.labeled_count();
  r.vibes_accepted = run.state.vibes.size();
  r.stop_reason = orchestrator::to_string(run.stop);
  for (const auto& it : run.iterations) {
    IterationSummary s;
    s.iteration = it.iteration;
    s.sampled = it.sample_ids.size();
    s.proposed = it.discovery.pool.size();
    s.clusters = it.discovery.clusters.size();
    s.candidates = it.candidates.size();
    s.accepted = it.accepted.size();
    s.train_mm_accuracy = it.train_mm_accuracy;
    s.misclassified = it.misclassified;
    r.iterations.push_back(s);
  }
  r.missing_cells = f.train_matrix.missing_count() + f.validation_matrix.missing_count();
  r.imputed_cells = f.train_imputed / 2 + f.validation_imputed / 2;
  auto add_scoring = [&](const judging::ScoringReport& s) {
    r.unparseable_verdicts += s.unparseable;
    r.repaired_verdicts += s.repaired;
  };
  for (const auto& it : run.iterations) add_scoring(it.scoring);
  add_scoring(run.preset_scoring);
  add_scoring(f.scoring);
  return r;
}

ordered_json to_json(const Report& r) {
  ordered_json j;
  j["model_a"] = r.model_a;
  j["model_b"] = r.model_b;
  ordered_json metrics;
  metrics["mm_accuracy"] = r.mm_accuracy;
  metrics["pp_accuracy"] = optional_json(r.pp_accuracy);
  metrics["mean_kappa"] = r.mean_kappa;
  metrics["train_mm_accuracy"] = r.train_mm_accuracy;
  j["metrics"] = metrics;
  ordered_json counts;
  counts["n_train"] = r.n_train;
  counts["n_validation"] = r.n_validation;
  counts["labeled_train"] = r.labeled_train;
  counts["labeled_validation"] = r.labeled_validation;
  counts["vibes_accepted"] = r.vibes_accepted;
  counts["missing_cells"] = r.missing_cells;
  counts["imputed_cells"] = r.imputed_cells;
  counts["unparseable_verdicts"] = r.unparseable_verdicts;
  counts["repaired_verdicts"] = r.repaired_verdicts;
  j["counts"] = counts;
  j["stop_reason"] = r.stop_reason;
  j["lars_order"] = r.lars_order;
  ordered_json iterations = ordered_json::array();
  for (const auto& s : r.iterations) {
    ordered_json it;
    it["iteration"] = s.iteration;
    it["sampled"] = s.sampled;
    it["proposed"] = s.proposed;
    it["clusters"] = s.clusters;
    it["candidates"] = s.candidates;
    it["accepted"] = s.accepted;
    it["train_mm_accuracy"] = s.train_mm_accuracy;
    it["misclassified"] = s.misclassified;
    iterations.push_back(it);
  }
  j["iterations"] = iterations;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json o;
    o["vibe_id"] = row.vibe_id;
    o["name"] = row.name;
    o["low"] = row.low;
    o["high"] = row.high;
    o["origin"] = row.origin;
    o["iteration"] = row.iteration;
    o["kappa"] = row.kappa;
    o["sep"] = row.sep;
    o["n_scored"] = row.n_scored;
    o["train_kappa"] = row.train_kappa;
    o["train_sep"] = row.train_sep;
    o["mm_coef"] = row.mm_coef;
    o["mm_pvalue"] = row.mm_pvalue;
    o["pp_coef"] = optional_json(row.pp_coef);
    o["pp_pvalue"] = optional_json(row.pp_pvalue);
    ordered_json high = ordered_json::array(), low = ordered_json::array();
    for (const auto& e : row.high_exemplars) high.push_back(exemplar_json(e));
    for (const auto& e : row.low_exemplars) low.push_back(exemplar_json(e));
    o["high_exemplars"] = high;
    o["low_exemplars"] = low;
    rows.push_back(o);
  }
  j["vibes"] = rows;
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.model_a = j.at("model_a").get<std::string>();
    r.model_b = j.at("model_b").get<std::string>();
    const auto& m = j.at("metrics");
    r.mm_accuracy = m.at("mm_accuracy").get<double>();
    r.pp_accuracy = optional_from<double>(m, "pp_accuracy");
    r.mean_kappa = m.at("mean_kappa").get<double>();
    r.train_mm_accuracy = m.at("train_mm_accuracy").get<double>();
    const auto& c = j.at("counts");
    r.n_train = c.at("n_train").get<std::size_t>();
    r.n_validation = c.at("n_validation").get<std::size_t>();
    r.labeled_train = c.at("labeled_train").get<std::size_t>();
    r.labeled_validation = c.at("labeled_validation").get<std::size_t>();
    r.vibes_accepted = c.at("vibes_accepted").get<std::size_t>();
    r.missing_cells = c.at("missing_cells").get<std::size_t>();
    r.imputed_cells = c.at("imputed_cells").get<std::size_t>();
    r.unparseable_verdicts = c.at("unparseable_verdicts").get<std::size_t>();
    r.repaired_verdicts = c.at("repaired_verdicts").get<std::size_t>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    r.lars_order = j.at("lars_order").get<std::vector<std::string>>();
    for (const auto& it : j.at("iterations")) {
      IterationSummary s;
      s.iteration = it.at("iteration").get<int>();
      s.sampled = it.at("sampled").get<std::size_t>();
      s.proposed = it.at("proposed").get<std::size_t>();
      s.clusters = it.at("clusters").get<std::size_t>();
      s.candidates = it.at("candidates").get<std::size_t>();
      s.accepted = it.at("accepted").get<std::size_t>();
      s.train_mm_accuracy = it.at("train_mm_accuracy").get<double>();
      s.misclassified = it.at("misclassified").get<std::size_t>();
      r.iterations.push_back(s);
    }
    for (const auto& o : j.at("vibes")) {
      Row row;
      row.vibe_id = o.at("vibe_id").get<std::string>();
      row.name = o.at("name").get<std::string>();
      row.low = o.at("low").get<std::string>();
      row.high = o.at("high").get<std::string>();
      row.origin = o.at("origin").get<std::string>();
      row.iteration = o.at("iteration").get<int>();
      row.kappa = o.at("kappa").get<double>();
      row.sep = o.at("sep").get<double>();
      row.n_scored = o.at("n_scored").get<std::size_t>();
      row.train_kappa = o.at("train_kappa").get<double>();
      row.train_sep = o.at("train_sep").get<double>();
      row.mm_coef = o.at("mm_coef").get<double>();
      row.mm_pvalue = o.at("mm_pvalue").get<double>();
      row.pp_coef = optional_from<double>(o, "pp_coef");
      row.pp_pvalue = optional_from<double>(o, "pp_pvalue");
      for (const auto& e : o.at("high_exemplars")) row.high_exemplars.push_back(exemplar_from(e));
      for (const auto& e : o.at("low_exemplars")) row.low_exemplars.push_back(exemplar_from(e));
      r.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("report.json is malformed: ") + e.what());
  }
  return r;
}

std::string render_markdown(const Report& r) {
  std::string out;
  out += "# Vibe report: " + r.model_a + " vs " + r.model_b + "\n\n";
  out += "Positive separability and coefficients mean " + r.model_a +
         " (model A) sits toward the High description; negative values favour " + r.model_b + " (model B).\n\n";

  out += "## Summary\n\n| Metric | Value |\n|---|---|\n";
  out += "| Model-matching accuracy (held-out) | " + fixed(r.mm_accuracy, 4) + " |\n";
  if (r.pp_accuracy) out += "| Preference prediction accuracy (held-out) | " + fixed(*r.pp_accuracy, 4) + " |\n";
  out += "| Mean Cohen's kappa (held-out, selected vibes) | " + fixed(r.mean_kappa, 4) + " |\n";
  out += "| Model-matching accuracy (train) | " + fixed(r.train_mm_accuracy, 4) + " |\n";
  out += "| Records (train / validation) | " + std::to_string(r.n_train) + " / " + std::to_string(r.n_validation) +
         " |\n";
  if (r.labeled_train + r.labeled_validation > 0)
    out += "| Labeled records (train / validation) | " + std::to_string(r.labeled_train) + " / " +
           std::to_string(r.labeled_validation) + " |\n";
  out += "| Vibes accepted / selected | " + std::to_string(r.vibes_accepted) + " / " + std::to_string(r.rows.size()) +
         " |\n";
  out += "| Stop reason | " + r.stop_reason + " |\n\n";

  if (!r.iterations.empty()) {
    out += "## Iterations\n\n| Pass | Sampled | Proposed | Clusters | Candidates | Accepted | Train MM | Misclassified |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& s : r.iterations)
      out += "| " + std::to_string(s.iteration) + " | " + std::to_string(s.sampled) + " | " +
             std::to_string(s.proposed) + " | " + std::to_string(s.clusters) + " | " + std::to_string(s.candidates) +
             " | " + std::to_string(s.accepted) + " | " + fixed(s.train_mm_accuracy, 4) + " | " +
             std::to_string(s.misclassified) + " |\n";
    out += "\n";
  }

  out += "## Vibes\n\n";
  const bool pp = r.pp_accuracy.has_value();
  out += "| # | Vibe | Low | High | Kappa | Sep | MM coef | MM p |";
  out += pp ? " PP coef | PP p |\n" : "\n";
  out += pp ? "|---|---|---|---|---|---|---|---|---|---|\n" : "|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const Row& row = r.rows[i];
    out += "| " + std::to_string(i + 1) + " | " + cell(row.name) + " | " + cell(row.low) + " | " + cell(row.high) +
           " | " + fixed(row.kappa, 3) + " | " + signed_fixed(row.sep, 3) + " | " + signed_fixed(row.mm_coef, 3) +
           " | " + pvalue(row.mm_pvalue) + " |";
    if (pp)
      out += " " + (row.pp_coef ? signed_fixed(*row.pp_coef, 3) : std::string("-")) + " | " +
             (row.pp_pvalue ? pvalue(*row.pp_pvalue) : std::string("-")) + " |";
    out += "\n";
  }

  out += "\n## Exemplars\n";
  for (const auto& row : r.rows) {
    out += "\n### " + row.name + "\n\n";
    auto list = [&](const char* heading, const std::vector<Exemplar>& items) {
      out += std::string("**") + heading + "**\n\n";
      if (items.empty()) {
        out += "- none\n\n";
        return;
      }
      for (const auto& e : items) {
        out += "- `" + e.record_id + "`: " + cell(e.prompt) + "\n";
        out += "  - A: " + cell(e.output_a) + "\n";
        out += "  - B: " + cell(e.output_b) + "\n";
      }
      out += "\n";
    };
    list("Model A higher", row.high_exemplars);
    list("Model B higher", row.low_exemplars);
  }

  out += "## Notes\n\n";
  out += "- Kappa, separability and exemplars come from the validation split. Coefficients come from fits on the "
         "training split.\n";
  out += "- Accuracy counts a decision value of exactly 0 as wrong.\n";
  out += "- p-values are Wald tests using the unpenalized observed information at the L2-penalized optimum, an "
         "approximation.\n";
  out += "- Missing score cells: " + std::to_string(r.missing_cells) + " (imputed as 0 in features: " +
         std::to_string(r.imputed_cells) + "). Judge answers unparseable after repair: " +
         std::to_string(r.unparseable_verdicts) + ".\n";
  return out;
}

std::string render_vibes_csv(const Report& r) {
  std::string out = "name,poles,kappa,sep,mm_coef,mm_pvalue,pp_coef,pp_pvalue\n";
  for (const auto& row : r.rows) {
    out += csv_field(row.name) + "," + csv_field("Low: " + row.low + "; High: " + row.high) + "," +
           format_number(row.kappa) + "," + format_number(row.sep) + "," + format_number(row.mm_coef) + "," +
           format_number(row.mm_pvalue) + "," + optional_number(row.pp_coef) + "," + optional_number(row.pp_pvalue) +
           "\n";
  }
  return out;
}

std::string render_metrics_csv(const Report& r) {
  std::string out = "metric,value\n";
  auto add = [&](const char* name, const std::string& value) { out += std::string(name) + "," + value + "\n"; };
  add("mm_accuracy", format_number(r.mm_accuracy));
  if (r.pp_accuracy) add("pp_accuracy", format_number(*r.pp_accuracy));
  add("mean_kappa", format_number(r.mean_kappa));
  add("train_mm_accuracy", format_number(r.train_mm_accuracy));
  add("n_train", std::to_string(r.n_train));
  add("n_validation", std::to_string(r.n_validation));
  add("vibes_accepted", std::to_string(r.vibes_accepted));
  add("vibes_selected", std::to_string(r.rows.size()));
  add("iterations", std::to_string(r.iterations.size()));
  add("missing_cells", std::to_string(r.missing_cells));
  add("imputed_cells", std::to_string(r.imputed_cells));
  add("unparseable_verdicts", std::to_string(r.unparseable_verdicts));
  return out;
}

std::string render_scores_csv(const ScoreMatrix& train, const ScoreMatrix& validation) {
  const std::size_t judges = std::max(train.judge_count(), validation.judge_count());
  std::string out = "split,record_id,vibe_id";
  for (std::size_t j = 0; j < judges; ++j) out += ",judge_" + std::to_string(j + 1);
  out += ",aggregated\n";
  auto emit = [&](const char* split, const ScoreMatrix& m) {
    for (std::size_t r = 0; r < m.records().size(); ++r)
      for (std::size_t v = 0; v < m.vibes().size(); ++v) {
        out += std::string(split) + "," + csv_field(m.records()[r]) + "," + csv_field(m.vibes()[v]);
        for (std::size_t j = 0; j < judges; ++j) {
          out += ",";
          if (j < m.judge_count())
            if (auto s = m.judge_score(r, v, j)) out += std::to_string(s->value());
        }
        out += ",";
        if (auto s = m.aggregated(r, v)) out += std::to_string(s->value());
        out += "\n";
      }
  };
  emit("train", train);
  emit("validation", validation);
  return out;
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["d"] = c.d;
  j["batch"] = c.batch;
  j["iterations"] = c.iterations;
  j["num_eval_vibes"] = c.num_eval_vibes;
  j["num_final_vibes"] = c.num_final_vibes;
  j["kappa_min"] = c.kappa_min;
  j["sep_min"] = c.sep_min;
  j["proposer_model"] = c.proposer_model;
  j["judge_models"] = c.judge_models;
  j["embed_model"] = c.embed_model;
  j["preference_judge_models"] = c.preference_judge_models;
  j["classifier_model"] = c.classifier_model;
  j["proposer_temperature"] = c.proposer_temperature;
  j["cluster_threshold"] = c.cluster_threshold;
  j["max_missing_fraction"] = c.max_missing_fraction;
  j["train_fraction"] = c.train_fraction;
  j["seed"] = c.seed;
  j["concurrency"] = c.concurrency;
  j["l2_lambda"] = c.l2_lambda;
  return j;
}

void write_text(const std::filesystem::path& path, std::string_view body) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_run_directory(const std::filesystem::path& dir, const orchestrator::RunOutput& run,
                         const ingest::Split& split, const RunConfig& config, const ManifestInfo& info) {
  try {
    std::filesystem::create_directories(dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot create run directory: ") + e.what());
  }
  const Report r = build_report(run, split);
  const std::string config_body = config_to_json(config).dump(2) + "\n";
  write_text(dir / "config.json", config_body);
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  write_text(dir / "report.md", render_markdown(r));
  write_text(dir / "vibes.csv", render_vibes_csv(r));
  write_text(dir / "metrics.csv", render_metrics_csv(r));
  write_text(dir / "scores.csv", render_scores_csv(run.final.train_matrix, run.final.validation_matrix));

  JsonLines split_lines;
  for (const auto& rec : split.train.records) split_lines.add(ordered_json{{"record_id", rec.id}, {"split", "train"}});
  for (const auto& rec : split.validation.records)
    split_lines.add(ordered_json{{"record_id", rec.id}, {"split", "validation"}});
  write_text(dir / "split.jsonl", split_lines.body());

  for (const auto& it : run.iterations) write_iteration(dir / ("iter_" + std::to_string(it.iteration)), it);
  if (run.stop == orchestrator::StopReason::Preset)
    write_text(dir / "fixed" / "judgments.jsonl", judgments_body(run.preset_scoring));

  JsonLines accepted;
  for (std::size_t i = 0; i < run.state.vibes.size(); ++i) {
    ordered_json j = vibe_json(run.state.vibes[i]);
    if (i < run.state.stats.size()) j["train"] = stats_json(run.state.stats[i]);
    accepted.add(j);
  }
  write_text(dir / "accepted.jsonl", accepted.body());

  JsonLines selection;
  for (std::size_t i = 0; i < run.final.lars_order.size(); ++i)
    selection.add(ordered_json{{"lars_rank", i + 1}, {"vibe_id", run.final.lars_order[i]}});
  write_text(dir / "final" / "selection.jsonl", selection.body());
  write_text(dir / "final" / "judgments.jsonl", judgments_body(run.final.scoring));

  ordered_json manifest;
  manifest["tool"] = "vibecheck";
  manifest["format_version"] = 1;
  manifest["mode"] = info.mode;
  manifest["dataset"] = info.dataset_path;
  manifest["dataset_digest"] = info.dataset_digest;
  manifest["config_digest"] = gateway::sha256_hex(config_body);
  manifest["ties_dropped"] = info.ties_dropped;
  manifest["missing_cells"] = r.missing_cells;
  manifest["imputed_cells"] = r.imputed_cells;
  manifest["unparseable_verdicts"] = r.unparseable_verdicts;
  ordered_json g;
  g["chat_requests"] = info.gateway.chat_requests;
  g["embed_texts"] = info.gateway.embed_texts;
  g["cache_hits"] = info.gateway.cache_hits;
  g["cache_misses"] = info.gateway.cache_misses;
  g["cache_hit_rate"] = info.gateway.hit_rate();
  g["provider_calls"] = info.gateway.provider_calls;
  g["retries"] = info.gateway.retries;
  manifest["gateway"] = g;
  manifest["created_at"] = info.created_at;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

void rerender(const std::filesystem::path& dir) {
  json j;
  try {
    j = json::parse(read_text(dir / "report.json"));
  } catch (const json::exception& e) {
    throw DataError(std::string("report.json is not valid JSON: ") + e.what());
  }
  const Report r = report_from_json(j);
  write_text(dir / "report.md", render_markdown(r));
  write_text(dir / "vibes.csv", render_vibes_csv(r));
  write_text(dir / "metrics.csv", render_metrics_csv(r));
}

}  // namespace vibecheck::report
