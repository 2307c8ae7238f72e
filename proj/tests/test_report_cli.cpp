#include <gtest/gtest.h>

#include <fstream>
#include <memory>

#include "planted.hpp"
#include "vibecheck/cli.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/gateway/mock_provider.hpp"
#include "vibecheck/ingest.hpp"
#include "vibecheck/orchestrator.hpp"
#include "vibecheck/axis_format.hpp"
#include "vibecheck/presets.hpp"
#include "vibecheck/report.hpp"

using namespace vibecheck;
namespace fs = std::filesystem;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::vector<std::string> split_csv_header(const std::string& csv) {
  std::vector<std::string> cols;
  const std::string header = csv.substr(0, csv.find('\n'));
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = header.find(',', start);
    cols.push_back(header.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cols;
}

// Writes the planted corpus and returns the dataset path.
fs::path planted_file(const fs::path& dir, bool preferences, std::size_t n = 120) {
  fixtures::PlantedOptions o;
  o.records = n;
  o.preferences = preferences;
  const auto path = dir / "data.jsonl";
  ingest::save_dataset(fixtures::planted_corpus(o), path);
  return path;
}

}  // namespace

TEST(Presets, TenAxesThatRoundTrip) {
  const auto p = preset_vibes();
  ASSERT_EQ(p.size(), 10u);
  bool humor = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i].id, "preset-" + std::to_string(i));
    EXPECT_EQ(p[i].origin, VibeOrigin::Preset);
    const Vibe back = parse_axis(p[i].render());
    EXPECT_EQ(back.name, p[i].name);
    EXPECT_EQ(back.low, p[i].low);
    EXPECT_EQ(back.high, p[i].high);
    if (p[i].name == "Humor and Playfulness") {
      humor = true;
      EXPECT_EQ(p[i].high, "Uses humor, playful language, or wordplay");
    }
  }
  EXPECT_TRUE(humor);
  EXPECT_EQ(p.front().name, "Assertiveness");
  EXPECT_EQ(p.back().name, "Conciseness");
}

TEST(ReportFormat, NumbersAndCsvFields) {
  EXPECT_EQ(report::format_number(0.123456789), "0.123457");
  EXPECT_EQ(report::format_number(-0.0), "0");
  EXPECT_EQ(report::format_number(1234567.0), "1.23457e+06");
  EXPECT_EQ(report::csv_field("plain"), "plain");
  EXPECT_EQ(report::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(report::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Config, KeyValueTextAndFlagsSpellings) {
  RunConfig c;
  cli::apply_config_text(c, "# comment\niterations = 5\nbatch_size=4\njudges=a/x, b/y\nkappa-min=0.3\n\n");
  EXPECT_EQ(c.iterations, 5u);
  EXPECT_EQ(c.batch, 4u);
  EXPECT_EQ(c.judge_models, (std::vector<std::string>{"a/x", "b/y"}));
  EXPECT_DOUBLE_EQ(c.kappa_min, 0.3);
  EXPECT_THROW(cli::set_config(c, "nope", "1"), ConfigError);
  EXPECT_THROW(cli::set_config(c, "seed", "-3"), ConfigError);
  EXPECT_THROW(cli::set_config(c, "sep-min", "abc"), ConfigError);
  EXPECT_THROW(cli::apply_config_text(c, "just words\n"), ConfigError);
}

TEST(Cli, ExitCodesByErrorCategory) {
  EXPECT_EQ(cli::exit_code_for(ConfigError("x")), cli::kConfigError);
  EXPECT_EQ(cli::exit_code_for(EmptyDataset()), cli::kDataError);
  EXPECT_EQ(cli::exit_code_for(ProviderError("x", true)), cli::kProviderError);
  EXPECT_EQ(cli::exit_code_for(AuthError("x")), cli::kProviderError);
  EXPECT_EQ(cli::exit_code_for(NoVibesSurvived()), cli::kQualityError);
  EXPECT_EQ(cli::exit_code_for(std::runtime_error("x")), cli::kOtherError);
}

TEST(Cli, UsageAndDataErrors) {
  const auto dir = fixtures::scratch_dir("cli-errors");
  EXPECT_EQ(cli::run_command({"-q", "run", "--out", (dir / "o").string()}), cli::kConfigError);
  EXPECT_EQ(cli::run_command({"-q", "frobnicate"}), cli::kConfigError);
  EXPECT_EQ(cli::run_command({"-q", "run", "--data", (dir / "absent.jsonl").string(), "--mock-config",
                              fixtures::fixture_path("planted_rules.txt").string()}),
            cli::kDataError);
  const auto data = planted_file(dir, false, 20);
  EXPECT_EQ(cli::run_command({"-q", "run", "--data", data.string(), "--kappa-min", "7", "--mock-config",
                              fixtures::fixture_path("planted_rules.txt").string()}),
            cli::kConfigError);
  EXPECT_EQ(cli::run_command({"-q", "run", "--data", data.string(), "--mock-config", (dir / "none.txt").string()}),
            cli::kConfigError);
}

TEST(Cli, ProviderFailureExitCode) {
  const auto dir = fixtures::scratch_dir("cli-provider");
  const auto data = planted_file(dir, false, 20);
  {
    std::ofstream(dir / "rules.txt") << "reduce * echo\n";
  }
  EXPECT_EQ(cli::run_command({"-q", "run", "--data", data.string(), "--out", (dir / "o").string(), "--mock-config",
                              (dir / "rules.txt").string()}),
            cli::kProviderError);
}

TEST(Cli, RunWritesDocumentedFilesAndRerenders) {
  const auto dir = fixtures::scratch_dir("cli-run");
  const auto data = planted_file(dir, true);
  const auto out = dir / "run";
  const std::string rules = fixtures::fixture_path("planted_rules.txt").string();
  ASSERT_EQ(cli::run_command({"-q", "run", "--data", data.string(), "--out", out.string(), "--mock-config", rules,
                              "--seed", "0", "--cache", (dir / "cache").string()}),
            cli::kOk);
  for (const char* f : {"report.md", "report.json", "vibes.csv", "scores.csv", "metrics.csv", "config.json",
                        "manifest.json", "split.jsonl", "accepted.jsonl", "final/selection.jsonl",
                        "final/judgments.jsonl", "iter_0/sample.jsonl", "iter_0/proposals.jsonl", "iter_0/pool.jsonl",
                        "iter_0/clusters.jsonl", "iter_0/reduced.jsonl", "iter_0/vibes.jsonl",
                        "iter_0/judgments.jsonl"})
    EXPECT_TRUE(fs::exists(out / f)) << f;

  const std::string vibes = report::read_text(out / "vibes.csv");
  EXPECT_EQ(split_csv_header(vibes), (std::vector<std::string>{"name", "poles", "kappa", "sep", "mm_coef",
                                                                "mm_pvalue", "pp_coef", "pp_pvalue"}));
  const std::string md = report::read_text(out / "report.md");
  EXPECT_NE(md.find("Preference prediction accuracy"), std::string::npos);
  EXPECT_NE(md.find("Section Headers"), std::string::npos);

  const auto manifest = nlohmann::json::parse(report::read_text(out / "manifest.json"));
  EXPECT_EQ(manifest.at("mode"), "discover");
  EXPECT_EQ(manifest.at("config_digest").get<std::string>().size(), 64u);
  EXPECT_TRUE(manifest.at("gateway").contains("cache_hit_rate"));

  // report.md, vibes.csv and metrics.csv are reproduced from report.json alone.
  const std::string csv = report::read_text(out / "metrics.csv");
  fs::remove(out / "report.md");
  fs::remove(out / "vibes.csv");
  ASSERT_EQ(cli::run_command({"-q", "report", "--out", out.string()}), cli::kOk);
  EXPECT_EQ(report::read_text(out / "report.md"), md);
  EXPECT_EQ(report::read_text(out / "vibes.csv"), vibes);
  EXPECT_EQ(report::read_text(out / "metrics.csv"), csv);
}

TEST(Cli, UnlabeledDataLeavesPreferenceColumnsEmpty) {
  const auto dir = fixtures::scratch_dir("cli-unlabeled");
  const auto data = planted_file(dir, false);
  const auto out = dir / "run";
  ASSERT_EQ(cli::run_command({"-q", "run", "--data", data.string(), "--out", out.string(), "--mock-config",
                              fixtures::fixture_path("planted_rules.txt").string()}),
            cli::kOk);
  const std::string md = report::read_text(out / "report.md");
  EXPECT_EQ(md.find("Preference prediction accuracy"), std::string::npos);
  const std::string vibes = report::read_text(out / "vibes.csv");
  std::size_t pos = vibes.find('\n') + 1;
  while (pos < vibes.size()) {
    const std::size_t end = vibes.find('\n', pos);
    const std::string line = vibes.substr(pos, end - pos);
    EXPECT_EQ(line.substr(line.size() - 2), ",,") << line;
    pos = end + 1;
  }
  const std::string metrics = report::read_text(out / "metrics.csv");
  EXPECT_EQ(metrics.find("pp_accuracy"), std::string::npos);
}

TEST(Cli, ScoreModeUsesGivenVibes) {
  const auto dir = fixtures::scratch_dir("cli-score");
  const auto data = planted_file(dir, true);
  {
    std::ofstream(dir / "vibes.txt") << "Emoji Use: Low: No emoji; High: Ends with an emoji\n"
                                        "First-Person Voice: Low: Impersonal; High: Speaks in the first person\n";
  }
  const auto out = dir / "run";
  ASSERT_EQ(cli::run_command({"-q", "score", "--data", data.string(), "--vibes", (dir / "vibes.txt").string(),
                              "--out", out.string(), "--mock-config",
                              fixtures::fixture_path("planted_rules.txt").string()}),
            cli::kOk);
  const std::string vibes = report::read_text(out / "vibes.csv");
  EXPECT_EQ(count_lines(vibes), 3u);
  EXPECT_TRUE(fs::exists(out / "fixed/judgments.jsonl"));
  EXPECT_FALSE(fs::exists(out / "iter_0"));
}

TEST(Cli, LabelAndCategorizeWriteDatasets) {
  const auto dir = fixtures::scratch_dir("cli-label");
  const auto data = planted_file(dir, false, 40);
  const std::string rules = fixtures::fixture_path("planted_rules.txt").string();
  ASSERT_EQ(cli::run_command({"-q", "label", "--data", data.string(), "--out", (dir / "labeled.jsonl").string(),
                              "--mock-config", rules}),
            cli::kOk);
  const auto labeled = ingest::load_dataset(dir / "labeled.jsonl");
  EXPECT_GT(labeled.records.size(), 0u);
  EXPECT_TRUE(labeled.labeled());
  ASSERT_EQ(cli::run_command({"-q", "categorize", "--data", data.string(), "--out", (dir / "tagged.jsonl").string(),
                              "--mock-config", rules}),
            cli::kOk);
  const auto tagged = ingest::load_dataset(dir / "tagged.jsonl");
  ASSERT_EQ(tagged.records.size(), 40u);
  for (const auto& r : tagged.records) {
    ASSERT_TRUE(r.topic);
    if (r.prompt.find("equation") != std::string::npos) EXPECT_EQ(*r.topic, "stem");
    if (r.prompt.find("poem") != std::string::npos) EXPECT_EQ(*r.topic, "writing");
  }
}

TEST(Report, ExemplarsFollowScoreDirection) {
  fixtures::PlantedOptions o;
  o.records = 120;
  const auto split = ingest::split_dataset(fixtures::planted_corpus(o), 0.5, 0);
  gateway::Gateway gw;
  gw.set_catch_all(std::make_shared<gateway::MockProvider>(
      gateway::MockRules::parse(fixtures::read_fixture("planted_rules.txt"))));
  RunConfig config;
  const auto run = orchestrator::run_pipeline(gw, config, split);
  const auto rep = report::build_report(run, split);
  ASSERT_FALSE(rep.rows.empty());
  for (const auto& row : rep.rows) {
    EXPECT_LE(row.high_exemplars.size(), 3u);
    const auto col = run.final.validation_matrix.vibe_index(row.vibe_id);
    for (const auto& e : row.high_exemplars)
      EXPECT_EQ(run.final.validation_matrix.aggregated(run.final.validation_matrix.record_index(e.record_id), col),
                Score(1));
    for (const auto& e : row.low_exemplars)
      EXPECT_EQ(run.final.validation_matrix.aggregated(run.final.validation_matrix.record_index(e.record_id), col),
                Score(-1));
  }
  const auto back = report::report_from_json(nlohmann::json::parse(report::to_json(rep).dump()));
  EXPECT_EQ(report::render_markdown(back), report::render_markdown(rep));
}
