#include "vibecheck/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <unordered_set>

#include "vibecheck/errors.hpp"
#include "vibecheck/judging.hpp"
#include "vibecheck/parallel.hpp"
#include "vibecheck/prompts.hpp"
#include "vibecheck/random.hpp"
#include "vibecheck/text.hpp"

namespace vibecheck::ingest {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string required_string(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(line, std::string("missing field \"") + field + "\"");
  if (!it->is_string()) throw ParseError(line, std::string("field \"") + field + "\" must be a string");
  std::string value = it->get<std::string>();
  if (text::trim(value).empty()) throw ParseError(line, std::string("field \"") + field + "\" is empty");
  return value;
}

// Returns false for a tie.
bool read_preference(const json& obj, std::size_t line, std::optional<Preference>& out) {
  auto it = obj.find("preference");
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_string()) throw ParseError(line, "field \"preference\" must be a string");
  const std::string v = text::to_lower(text::trim(it->get<std::string>()));
  if (v == "a") out = Preference::A;
  else if (v == "b") out = Preference::B;
  else if (v == "tie") return false;
  else throw ParseError(line, "field \"preference\" must be A, B or tie, got \"" + it->get<std::string>() + "\"");
  return true;
}

}  // namespace

bool Dataset::labeled() const noexcept {
  return !records.empty() && labeled_count() == records.size();
}

std::size_t Dataset::labeled_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.preference.has_value(); }));
}

Dataset parse_dataset(std::string_view body, LoadReport* report) {
  Dataset data;
  LoadReport stats;
  std::unordered_set<std::string> ids;
  bool first_content = true;
  std::size_t number = 0;

  for (std::string_view raw : text::split_lines(body)) {
    ++number;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    ++stats.lines;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(number, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(number, "expected a JSON object");

    if (first_content && obj.contains("schema_version")) {
      first_content = false;
      if (obj["schema_version"] != 1) throw ParseError(number, "unsupported schema_version");
      if (obj.contains("model_a")) data.model_a_name = obj["model_a"].get<std::string>();
      if (obj.contains("model_b")) data.model_b_name = obj["model_b"].get<std::string>();
      continue;
    }
    first_content = false;

    ComparisonRecord r;
    r.id = required_string(obj, "id", number);
    r.prompt = required_string(obj, "prompt", number);
    r.output_a = required_string(obj, "output_a", number);
    r.output_b = required_string(obj, "output_b", number);
    if (auto it = obj.find("topic"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(number, "field \"topic\" must be a string");
      r.topic = it->get<std::string>();
    }
    if (auto it = obj.find("meta"); it != obj.end() && !it->is_null()) {
      if (!it->is_object()) throw ParseError(number, "field \"meta\" must be an object of strings");
      for (const auto& [k, v] : it->items()) {
        if (!v.is_string()) throw ParseError(number, "meta value \"" + k + "\" must be a string");
        r.meta[k] = v.get<std::string>();
      }
    }
    const bool kept = read_preference(obj, number, r.preference);
    if (!ids.insert(r.id).second) throw DuplicateId(r.id);
    if (!kept) {
      ++stats.ties_dropped;
      continue;
    }
    data.records.push_back(std::move(r));
  }

  if (stats.ties_dropped) spdlog::info("dropped {} records whose preference is a tie", stats.ties_dropped);
  if (report) *report = stats;
  if (data.records.empty()) throw EmptyDataset();
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset " + path.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_dataset(body, report);
}

std::string serialize_dataset(const Dataset& data) {
  std::string out;
  ordered_json header;
  header["schema_version"] = 1;
  header["model_a"] = data.model_a_name;
  header["model_b"] = data.model_b_name;
  out += header.dump() + "\n";
  for (const auto& r : data.records) {
    ordered_json j;
    j["id"] = r.id;
    j["prompt"] = r.prompt;
    j["output_a"] = r.output_a;
    j["output_b"] = r.output_b;
    if (r.preference) j["preference"] = *r.preference == Preference::A ? "A" : "B";
    if (r.topic) j["topic"] = *r.topic;
    if (!r.meta.empty()) j["meta"] = r.meta;
    out += j.dump() + "\n";
  }
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  out << serialize_dataset(data);
  if (!out) throw IoError("failed writing dataset " + path.string());
}

Split split_dataset(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("train fraction must lie strictly between 0 and 1");
  const std::size_t n = data.records.size();
  if (n < 2) throw TooFewRecords("splitting needs at least 2 records, got " + std::to_string(n));

  // Strata: labeled A, labeled B, unlabeled.
  std::vector<std::size_t> strata[3];
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = data.records[i].preference;
    strata[!p ? 2 : (*p == Preference::A ? 0 : 1)].push_back(i);
  }

  const auto target = static_cast<std::size_t>(
      std::clamp<double>(std::round(fraction * static_cast<double>(n)), 1.0, static_cast<double>(n - 1)));
  std::size_t quota[3];
  double remainder[3];
  std::size_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double exact = fraction * static_cast<double>(strata[s].size());
    quota[s] = static_cast<std::size_t>(std::floor(exact));
    remainder[s] = exact - std::floor(exact);
    assigned += quota[s];
  }
  while (assigned < target) {
    int best = -1;
    for (int s = 0; s < 3; ++s)
      if (quota[s] < strata[s].size() && (best < 0 || remainder[s] > remainder[best])) best = s;
    ++quota[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  while (assigned > target) {
    int best = -1;
    for (int s = 0; s < 3; ++s)
      if (quota[s] > 0 && (best < 0 || remainder[s] < remainder[best])) best = s;
    --quota[best];
    remainder[best] = 2.0;
    --assigned;
  }

  std::vector<bool> in_train(n, false);
  auto rng = stream(seed, 0x73706c6974ULL);
  for (int s = 0; s < 3; ++s) {
    auto order = permutation(strata[s].size(), rng);
    for (std::size_t k = 0; k < quota[s]; ++k) in_train[strata[s][order[k]]] = true;
  }

  Split split;
  split.train.model_a_name = split.validation.model_a_name = data.model_a_name;
  split.train.model_b_name = split.validation.model_b_name = data.model_b_name;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? split.train : split.validation).records.push_back(data.records[i]);
  return split;
}

// --- preference labeling -----------------------------------------------------

const char* to_string(Vote v) noexcept {
  switch (v) {
    case Vote::A: return "A";
    case Vote::B: return "B";
    case Vote::Tie: return "tie";
  }
  return "tie";
}

Vote judge_vote(Decision ab, Decision ba) noexcept {
  const int s = judging::debias(ab, ba).value();
  return s > 0 ? Vote::A : (s < 0 ? Vote::B : Vote::Tie);
}

std::optional<Preference> ensemble_label(Vote first, Vote second) noexcept {
  if (first != second || first == Vote::Tie) return std::nullopt;
  return first == Vote::A ? Preference::A : Preference::B;
}

namespace {

Decision ask_preference(gateway::Gateway& gateway, const std::string& judge, const ComparisonRecord& r, bool swap,
                        std::size_t& unparseable) {
  gateway::ChatRequest request;
  request.model = judge;
  request.system = std::string(prompts::kPreferenceSystem);
  request.user = swap ? prompts::preference(r.prompt, r.output_b, r.output_a)
                      : prompts::preference(r.prompt, r.output_a, r.output_b);
  std::string text = gateway.chat(request).text;
  try {
    return judging::parse_verdict(text).decision;
  } catch (const UnparseableVerdict&) {
  }
  request.user = prompts::repair(request.user, text, prompts::kVerdictRepair);
  try {
    return judging::parse_verdict(gateway.chat(request).text).decision;
  } catch (const UnparseableVerdict&) {
    ++unparseable;
    return Decision::NotApplicable;
  }
}

}  // namespace

Dataset generate_preferences(const Dataset& data, gateway::Gateway& gateway, const RunConfig& config,
                             LabelReport* report) {
  const auto& judges = config.preference_judge_models;
  if (judges.size() != 2) throw ConfigError("preference labeling needs exactly two judge models");
  const std::size_t n = data.records.size();

  // decisions[(record * 2 + judge) * 2 + ordering]
  std::vector<Decision> decisions(n * 4, Decision::NotApplicable);
  std::vector<std::size_t> unparseable(n * 4, 0);
  parallel_for(n * 4, gateway.concurrency(), [&](std::size_t t) {
    const std::size_t r = t / 4, j = (t / 2) % 2;
    decisions[t] = ask_preference(gateway, judges[j], data.records[r], t % 2 == 1, unparseable[t]);
  });

  Dataset out;
  out.model_a_name = data.model_a_name;
  out.model_b_name = data.model_b_name;
  LabelReport stats;
  stats.judged = n;
  for (std::size_t r = 0; r < n; ++r) {
    const Vote first = judge_vote(decisions[r * 4], decisions[r * 4 + 1]);
    const Vote second = judge_vote(decisions[r * 4 + 2], decisions[r * 4 + 3]);
    stats.votes.emplace_back(first, second);
    for (std::size_t k = 0; k < 4; ++k) stats.unparseable += unparseable[r * 4 + k];
    if (auto label = ensemble_label(first, second)) {
      ComparisonRecord rec = data.records[r];
      rec.preference = *label;
      out.records.push_back(std::move(rec));
      ++stats.labeled;
    } else if (first == Vote::Tie || second == Vote::Tie) {
      ++stats.dropped_tie;
    } else {
      ++stats.dropped_conflict;
    }
  }
  spdlog::info("preference labeling kept {} of {} records ({} tie, {} conflicting)", stats.labeled, n,
               stats.dropped_tie, stats.dropped_conflict);
  if (report) *report = std::move(stats);
  return out;
}

// --- topics ------------------------------------------------------------------

std::string parse_category(std::string_view response) {
  const std::string low = text::to_lower(response);
  std::size_t last = std::string::npos;
  std::string found = "other";
  for (std::size_t p = low.find("category"); p != std::string::npos; p = low.find("category", p + 1)) {
    std::size_t q = p + 8;
    while (q < low.size() && (low[q] == ':' || low[q] == ' ' || low[q] == '*' || low[q] == '"' || low[q] == '\''))
      ++q;
    std::string_view rest = std::string_view(low).substr(q);
    std::string label;
    if (rest.starts_with("stem")) label = "stem";
    else if (rest.starts_with("writing")) label = "writing";
    else if (rest.starts_with("other") || rest.starts_with("neither")) label = "other";
    if (!label.empty()) {
      last = p;
      found = label;
    }
  }
  if (last == std::string::npos) {
    std::string bare = text::to_lower(text::trim(response));
    if (bare == "stem") return "stem";
    if (bare == "writing" || bare == "writing/chatting") return "writing";
  }
  return found;
}

Dataset categorize_prompts(const Dataset& data, gateway::Gateway& gateway, const RunConfig& config) {
  Dataset out = data;
  parallel_for(out.records.size(), gateway.concurrency(), [&](std::size_t i) {
    gateway::ChatRequest request;
    request.model = config.classifier_model;
    request.system = std::string(prompts::kCategorySystem);
    request.user = prompts::category(out.records[i].prompt);
    out.records[i].topic = parse_category(gateway.chat(request).text);
  });
  return out;
}

Dataset filter_topic(const Dataset& data, std::string_view topic) {
  if (topic == "all") return data;
  Dataset out;
  out.model_a_name = data.model_a_name;
  out.model_b_name = data.model_b_name;
  for (const auto& r : data.records)
    if (r.topic && *r.topic == topic) out.records.push_back(r);
  return out;
}

}  // namespace vibecheck::ingest
