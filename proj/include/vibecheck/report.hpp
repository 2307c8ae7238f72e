#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vibecheck/core.hpp"
#include "vibecheck/gateway/gateway.hpp"
#include "vibecheck/ingest.hpp"
#include "vibecheck/orchestrator.hpp"

namespace vibecheck::report {

struct Exemplar {
  std::string record_id;
  std::string prompt;
  std::string output_a;
  std::string output_b;
};

struct Row {
  std::string vibe_id;
  std::string name;
  std::string low;
  std::string high;
  std::string origin;  // "discovered" or "preset"
  int iteration = 0;
  double kappa = 0.0;
  double sep = 0.0;
  std::size_t n_scored = 0;
  double train_kappa = 0.0;
  double train_sep = 0.0;
  double mm_coef = 0.0;
  double mm_pvalue = 1.0;
  std::optional<double> pp_coef;
  std::optional<double> pp_pvalue;
  std::vector<Exemplar> high_exemplars;  // aggregated score +1
  std::vector<Exemplar> low_exemplars;   // aggregated score -1
};

struct IterationSummary {
  int iteration = 0;
  std::size_t sampled = 0;
  std::size_t proposed = 0;
  std::size_t clusters = 0;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  double train_mm_accuracy = 0.0;
  std::size_t misclassified = 0;
};

/// Everything report.md and the CSV summaries are rendered from. It is
/// persisted as report.json so the text files can be regenerated.
struct Report {
  std::string model_a;
  std::string model_b;
  std::vector<Row> rows;  // sorted by |sep| descending
  std::vector<std::string> lars_order;
  double mm_accuracy = 0.0;
  std::optional<double> pp_accuracy;
  double mean_kappa = 0.0;
  double train_mm_accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::size_t labeled_train = 0;
  std::size_t labeled_validation = 0;
  std::size_t vibes_accepted = 0;
  std::string stop_reason;
  std::vector<IterationSummary> iterations;
  std::size_t missing_cells = 0;
  std::size_t imputed_cells = 0;
  std::size_t unparseable_verdicts = 0;
  std::size_t repaired_verdicts = 0;
};

Report build_report(const orchestrator::RunOutput& run, const ingest::Split& split);

nlohmann::ordered_json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

std::string render_markdown(const Report& report);

/// Columns name, poles, kappa, sep, mm_coef, mm_pvalue, pp_coef, pp_pvalue;
/// pp columns are empty for unlabeled data.
std::string render_vibes_csv(const Report& report);
/// Columns metric, value.
std::string render_metrics_csv(const Report& report);
/// Columns split, record_id, vibe_id, judge_1 ... judge_n, aggregated; empty
/// fields mark missing cells.
std::string render_scores_csv(const ScoreMatrix& train, const ScoreMatrix& validation);

/// Formats a number with 6 significant digits.
std::string format_number(double value);
std::string csv_field(std::string_view value);

struct ManifestInfo {
  std::string dataset_path;
  std::string dataset_digest;
  std::string mode;  // "discover", "preset" or "score"
  std::string created_at;
  gateway::GatewayStats gateway;
  std::size_t ties_dropped = 0;
};

nlohmann::ordered_json config_to_json(const RunConfig& config);

/// Writes report.md, report.json, vibes.csv, scores.csv, metrics.csv,
/// config.json, manifest.json and the per-iteration and final audit files.
/// Throws IoError.
void write_run_directory(const std::filesystem::path& dir, const orchestrator::RunOutput& run,
                         const ingest::Split& split, const RunConfig& config, const ManifestInfo& manifest);

/// Regenerates report.md, vibes.csv and metrics.csv from report.json.
void rerender(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view body);
std::string read_text(const std::filesystem::path& path);

}  // namespace vibecheck::report
