#include "vibecheck/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <ctime>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "vibecheck/axis_format.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/gateway/gateway.hpp"
#include "vibecheck/gateway/mock_provider.hpp"
#include "vibecheck/ingest.hpp"
#include "vibecheck/orchestrator.hpp"
#include "vibecheck/presets.hpp"
#include "vibecheck/report.hpp"
#include "vibecheck/text.hpp"

namespace vibecheck::cli {

namespace {

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto s = text::trim(value);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got \"" + std::string(value) + "\"");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string s(text::trim(value));
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(out))
    throw ConfigError(std::string(key) + ": expected a number, got \"" + std::string(value) + "\"");
  return out;
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = std::min(value.find(',', start), value.size());
    const auto item = text::trim(value.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

std::string normalise_key(std::string_view key) {
  std::string k(text::trim(key));
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (char& c : k)
    if (c == '_') c = '-';
  return k;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void setup_logging(bool quiet) {
  auto logger = spdlog::get("vibecheck");
  if (!logger) {
    logger = spdlog::stderr_color_mt("vibecheck");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
}

// Flags shared by every subcommand that talks to models.
struct GatewayFlags {
  std::string mock_config;
  std::string cache;
  std::string concurrency;
};

std::unique_ptr<gateway::Gateway> make_gateway(const GatewayFlags& flags, const RunConfig& config) {
  gateway::GatewayOptions options;
  options.concurrency = config.concurrency;
  if (!flags.cache.empty()) options.cache_dir = flags.cache;
  auto gw = std::make_unique<gateway::Gateway>(std::move(options));
  if (!flags.mock_config.empty()) {
    gw->set_catch_all(std::make_shared<gateway::MockProvider>(gateway::MockRules::load(flags.mock_config)));
  } else {
    gateway::register_default_providers(*gw);
  }
  return gw;
}

void add_gateway_flags(CLI::App& cmd, GatewayFlags& flags) {
  cmd.add_option("--mock-config", flags.mock_config, "Rule file for the offline mock provider");
  cmd.add_option("--cache", flags.cache, "Response cache directory");
}

// Config flags are collected as text and applied through set_config so the
// file and the command line share one validation path.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<CLI::Option*> options;
};

void add_config_flag(CLI::App& cmd, ConfigFlags& flags, const std::string& name, const std::string& help) {
  flags.options.push_back(cmd.add_option("--" + name, flags.values[name], help));
}

RunConfig build_config(const ConfigFlags& flags) {
  RunConfig config;
  if (!flags.config_file.empty()) apply_config_file(config, flags.config_file);
  for (const CLI::Option* opt : flags.options) {
    if (opt->count() == 0) continue;
    const std::string key = normalise_key(opt->get_name());
    set_config(config, key, flags.values.at(key));
  }
  config.validate();
  return config;
}

ingest::Dataset load_input(const std::string& path, std::optional<std::string> model_a,
                           std::optional<std::string> model_b, std::size_t* ties_dropped) {
  ingest::LoadReport load;
  ingest::Dataset data = ingest::load_dataset(path, &load);
  if (load.ties_dropped > 0) spdlog::info("dropped {} tied records", load.ties_dropped);
  if (ties_dropped) *ties_dropped = load.ties_dropped;
  if (model_a) data.model_a_name = *model_a;
  if (model_b) data.model_b_name = *model_b;
  return data;
}

struct RunFlags {
  std::string data;
  std::string out = "vibecheck-run";
  std::string model_a;
  std::string model_b;
  std::string topic = "all";
  std::string vibes;
  bool preset = false;
};

int do_run(const RunFlags& rf, const ConfigFlags& cf, const GatewayFlags& gf, const std::string& mode) {
  const RunConfig config = build_config(cf);
  std::size_t ties = 0;
  ingest::Dataset data = load_input(rf.data, rf.model_a.empty() ? std::nullopt : std::optional(rf.model_a),
                                    rf.model_b.empty() ? std::nullopt : std::optional(rf.model_b), &ties);
  const std::string topic = text::to_lower(rf.topic);
  if (topic != "all") {
    data = ingest::filter_topic(data, topic);
    if (data.records.empty()) throw EmptyDataset();
  }
  const ingest::Split split = ingest::split_dataset(data, config.train_fraction, config.seed);
  spdlog::info("{} training and {} validation records", split.train.records.size(), split.validation.records.size());

  auto gw = make_gateway(gf, config);
  std::optional<std::vector<Vibe>> fixed;
  if (mode == "preset") fixed = preset_vibes();
  if (mode == "score") fixed = load_vibes(rf.vibes);
  const orchestrator::RunOutput run = orchestrator::run_pipeline(*gw, config, split, std::move(fixed));

  report::ManifestInfo info;
  info.dataset_path = rf.data;
  info.dataset_digest = gateway::sha256_hex(report::read_text(rf.data));
  info.mode = mode;
  info.created_at = utc_timestamp();
  info.gateway = gw->stats();
  info.ties_dropped = ties;
  report::write_run_directory(rf.out, run, split, config, info);

  std::cout << "wrote " << rf.out << ": " << run.final.rows.size() << " vibes, model-matching accuracy "
            << report::format_number(run.final.mm_accuracy);
  if (run.final.pp_accuracy) std::cout << ", preference accuracy " << report::format_number(*run.final.pp_accuracy);
  std::cout << "\n";
  return kOk;
}

void add_run_flags(CLI::App& cmd, RunFlags& rf, ConfigFlags& cf) {
  cmd.add_option("--data", rf.data, "Comparison records (JSONL)")->required();
  cmd.add_option("--out", rf.out, "Run directory to write");
  cmd.add_option("--config", cf.config_file, "key=value configuration file; flags override it");
  cmd.add_option("--model-a", rf.model_a, "Display name of model A");
  cmd.add_option("--model-b", rf.model_b, "Display name of model B");
  cmd.add_option("--topic", rf.topic, "Restrict to one prompt topic")
      ->check(CLI::IsMember({"stem", "writing", "other", "all"}, CLI::ignore_case));
  add_config_flag(cmd, cf, "iterations", "Maximum discovery passes");
  add_config_flag(cmd, cf, "batch-size", "Records per proposer prompt");
  add_config_flag(cmd, cf, "discovery-size", "Records sampled per discovery pass");
  add_config_flag(cmd, cf, "num-eval-vibes", "Candidate vibes kept per pass");
  add_config_flag(cmd, cf, "num-final-vibes", "Vibes kept after LARS selection");
  add_config_flag(cmd, cf, "kappa-min", "Minimum judge agreement");
  add_config_flag(cmd, cf, "sep-min", "Minimum absolute separability");
  add_config_flag(cmd, cf, "train-fraction", "Fraction of records used for training");
  add_config_flag(cmd, cf, "seed", "Random seed");
  add_config_flag(cmd, cf, "proposer", "Proposer model");
  add_config_flag(cmd, cf, "judges", "Two judge models, comma separated");
  add_config_flag(cmd, cf, "embed-model", "Embedding model");
  add_config_flag(cmd, cf, "concurrency", "Maximum requests in flight");
  add_config_flag(cmd, cf, "l2-lambda", "L2 penalty of the logistic fits");
  add_config_flag(cmd, cf, "cluster-threshold", "Cosine distance merge threshold");
  add_config_flag(cmd, cf, "max-missing-fraction", "Tolerated fraction of failed score cells");
  add_config_flag(cmd, cf, "proposer-temperature", "Proposer sampling temperature");
}

}  // namespace

void set_config(RunConfig& c, std::string_view raw_key, std::string_view value) {
  const std::string key = normalise_key(raw_key);
  const std::string v(text::trim(value));
  if (key == "iterations") {
    c.iterations = parse_count(key, v);
  } else if (key == "batch-size" || key == "batch") {
    c.batch = parse_count(key, v);
  } else if (key == "discovery-size" || key == "d") {
    c.d = parse_count(key, v);
  } else if (key == "num-eval-vibes") {
    c.num_eval_vibes = parse_count(key, v);
  } else if (key == "num-final-vibes") {
    c.num_final_vibes = parse_count(key, v);
  } else if (key == "kappa-min") {
    c.kappa_min = parse_real(key, v);
  } else if (key == "sep-min") {
    c.sep_min = parse_real(key, v);
  } else if (key == "train-fraction") {
    c.train_fraction = parse_real(key, v);
  } else if (key == "seed") {
    c.seed = parse_count(key, v);
  } else if (key == "proposer" || key == "proposer-model") {
    c.proposer_model = v;
  } else if (key == "judges" || key == "judge-models") {
    c.judge_models = parse_list(v);
  } else if (key == "embed-model") {
    c.embed_model = v;
  } else if (key == "preference-judges" || key == "preference-judge-models") {
    c.preference_judge_models = parse_list(v);
  } else if (key == "classifier" || key == "classifier-model") {
    c.classifier_model = v;
  } else if (key == "concurrency") {
    c.concurrency = parse_count(key, v);
  } else if (key == "l2-lambda") {
    c.l2_lambda = parse_real(key, v);
  } else if (key == "cluster-threshold") {
    c.cluster_threshold = parse_real(key, v);
  } else if (key == "max-missing-fraction") {
    c.max_missing_fraction = parse_real(key, v);
  } else if (key == "proposer-temperature") {
    c.proposer_temperature = parse_real(key, v);
  } else {
    throw ConfigError("unknown configuration key \"" + std::string(raw_key) + "\"");
  }
}

void apply_config_text(RunConfig& config, std::string_view body) {
  std::size_t line_no = 0;
  for (const auto line : text::split_lines(body)) {
    ++line_no;
    const auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    set_config(config, s.substr(0, eq), s.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::string body;
  try {
    body = report::read_text(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  apply_config_text(config, body);
}

std::vector<Vibe> load_vibes(const std::filesystem::path& path) {
  const auto parsed = parse_axis_list(report::read_text(path));
  for (const auto& line : parsed.rejected) spdlog::warn("ignoring vibe line: {}", line);
  if (parsed.vibes.empty()) throw DataError("no vibes could be read from " + path.string());
  std::vector<Vibe> out;
  for (std::size_t i = 0; i < parsed.vibes.size(); ++i) {
    Vibe v = parsed.vibes[i];
    v.id = "fixed-" + std::to_string(i);
    v.origin = VibeOrigin::Preset;
    v.iteration = 0;
    out.push_back(std::move(v));
  }
  return out;
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (dynamic_cast<const DataError*>(&e)) return kDataError;
  if (dynamic_cast<const ProviderError*>(&e)) return kProviderError;
  if (dynamic_cast<const QualityError*>(&e)) return kQualityError;
  return kOtherError;
}

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Discover and measure qualitative differences between two models' outputs", "vibecheck"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  RunFlags run_flags;
  ConfigFlags run_config;
  GatewayFlags run_gateway;
  auto* run = app.add_subcommand("run", "Full discovery, scoring and report");
  add_run_flags(*run, run_flags, run_config);
  add_gateway_flags(*run, run_gateway);
  run->add_flag("--preset-vibes", run_flags.preset, "Skip discovery and score the built-in axes");

  RunFlags score_flags;
  ConfigFlags score_config;
  GatewayFlags score_gateway;
  auto* score = app.add_subcommand("score", "Score and report a given vibe list without discovery");
  add_run_flags(*score, score_flags, score_config);
  add_gateway_flags(*score, score_gateway);
  score->add_option("--vibes", score_flags.vibes, "One 'Name: Low: ...; High: ...' axis per line")->required();

  std::string label_data, label_out;
  ConfigFlags label_config;
  GatewayFlags label_gateway;
  auto* label = app.add_subcommand("label", "Generate preference labels with the judge ensemble");
  label->add_option("--data", label_data, "Comparison records (JSONL)")->required();
  label->add_option("--out", label_out, "Labeled JSONL to write")->required();
  label->add_option("--config", label_config.config_file, "key=value configuration file");
  add_config_flag(*label, label_config, "preference-judges", "Two preference judge models, comma separated");
  add_config_flag(*label, label_config, "concurrency", "Maximum requests in flight");
  add_gateway_flags(*label, label_gateway);

  std::string cat_data, cat_out;
  ConfigFlags cat_config;
  GatewayFlags cat_gateway;
  auto* categorize = app.add_subcommand("categorize", "Tag each prompt as stem, writing or other");
  categorize->add_option("--data", cat_data, "Comparison records (JSONL)")->required();
  categorize->add_option("--out", cat_out, "Tagged JSONL to write")->required();
  categorize->add_option("--config", cat_config.config_file, "key=value configuration file");
  add_config_flag(*categorize, cat_config, "classifier", "Topic classifier model");
  add_config_flag(*categorize, cat_config, "concurrency", "Maximum requests in flight");
  add_gateway_flags(*categorize, cat_gateway);

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Re-render report files from a run directory's report.json");
  rep->add_option("--out,dir", report_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  setup_logging(quiet);

  try {
    if (*run) return do_run(run_flags, run_config, run_gateway, run_flags.preset ? "preset" : "discover");
    if (*score) return do_run(score_flags, score_config, score_gateway, "score");
    if (*label) {
      const RunConfig config = build_config(label_config);
      const auto data = load_input(label_data, std::nullopt, std::nullopt, nullptr);
      auto gw = make_gateway(label_gateway, config);
      ingest::LabelReport lr;
      const auto labeled = ingest::generate_preferences(data, *gw, config, &lr);
      ingest::save_dataset(labeled, label_out);
      std::cout << "labeled " << lr.labeled << " of " << lr.judged << " records (" << lr.dropped_tie << " ties, "
                << lr.dropped_conflict << " conflicts dropped)\n";
      return kOk;
    }
    if (*categorize) {
      const RunConfig config = build_config(cat_config);
      const auto data = load_input(cat_data, std::nullopt, std::nullopt, nullptr);
      auto gw = make_gateway(cat_gateway, config);
      const auto tagged = ingest::categorize_prompts(data, *gw, config);
      ingest::save_dataset(tagged, cat_out);
      std::map<std::string, std::size_t> counts;
      for (const auto& r : tagged.records) ++counts[r.topic.value_or("other")];
      std::cout << "categorized " << tagged.records.size() << " records:";
      for (const auto& [topic, n] : counts) std::cout << " " << topic << "=" << n;
      std::cout << "\n";
      return kOk;
    }
    if (*rep) {
      report::rerender(report_dir);
      std::cout << "re-rendered " << report_dir << "\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e);
  }
  return kOtherError;
}

int run_command(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("vibecheck");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace vibecheck::cli
