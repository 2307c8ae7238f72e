#include "vibecheck/judging.hpp"

#include <cctype>
#include <spdlog/spdlog.h>

#include "vibecheck/errors.hpp"
#include "vibecheck/parallel.hpp"
#include "vibecheck/prompts.hpp"
#include "vibecheck/text.hpp"

namespace vibecheck::judging {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool decoration(char c) { return c == '"' || c == '\'' || c == '*' || c == '`' || c == '_' || c == '['; }

bool boundary_before(std::string_view s, std::size_t pos) { return pos == 0 || !word_char(s[pos - 1]); }
bool boundary_after(std::string_view s, std::size_t end) { return end >= s.size() || !word_char(s[end]); }

struct Hit {
  std::size_t pos;
  Decision decision;
};

// Designator after "model" at `p`, e.g. "model: a", "model **b**", "model: n/a".
std::optional<Decision> designator_at(std::string_view low, std::size_t p) {
  const std::size_t n = low.size();
  while (p < n && (std::isspace(static_cast<unsigned char>(low[p])) || decoration(low[p]) || low[p] == ':')) ++p;
  auto token = [&](std::string_view t) {
    return low.compare(p, t.size(), t) == 0 && boundary_after(low, p + t.size());
  };
  if (token("n/a")) return Decision::NotApplicable;
  if (token("tie")) return Decision::NotApplicable;
  if (token("a")) return Decision::FirstHigher;
  if (token("b")) return Decision::SecondHigher;
  return std::nullopt;
}

std::string_view strip_decoration(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (decoration(s.front()) || s.front() == '(')) s.remove_prefix(1);
  while (!s.empty() && (decoration(s.back()) || s.back() == '.' || s.back() == ')' || s.back() == ']'))
    s.remove_suffix(1);
  return text::trim(s);
}

}  // namespace

JudgeVerdict parse_verdict(std::string_view response) {
  const std::string low = text::to_lower(response);
  std::optional<Hit> last;
  auto consider = [&](std::size_t pos, Decision d) {
    if (!last || pos >= last->pos) last = Hit{pos, d};
  };

  for (std::size_t p = low.find("model"); p != std::string::npos; p = low.find("model", p + 1)) {
    if (!boundary_before(low, p)) continue;
    if (auto d = designator_at(low, p + 5)) consider(p, *d);
  }
  for (std::size_t p = low.find("n/a"); p != std::string::npos; p = low.find("n/a", p + 1)) {
    if (boundary_before(low, p) && boundary_after(low, p + 3)) consider(p, Decision::NotApplicable);
  }

  JudgeVerdict v;
  v.raw_response = std::string(response);
  v.rationale = std::string(text::trim(response));
  if (last) {
    v.decision = last->decision;
    return v;
  }
  std::string_view bare = strip_decoration(low);
  if (bare == "a") {
    v.decision = Decision::FirstHigher;
    return v;
  }
  if (bare == "b") {
    v.decision = Decision::SecondHigher;
    return v;
  }
  throw UnparseableVerdict("no model designator in judge response: " + text::excerpt(response, 120));
}

const char* to_string(Ordering o) noexcept { return o == Ordering::AB ? "AB" : "BA"; }

int named_model(Ordering ordering, Decision decision) noexcept {
  if (decision == Decision::NotApplicable) return 0;
  const int first = decision == Decision::FirstHigher ? 1 : -1;
  return ordering == Ordering::AB ? first : -first;
}

Score debias(Decision ab, Decision ba) noexcept {
  const int x = named_model(Ordering::AB, ab);
  const int y = named_model(Ordering::BA, ba);
  return x == y ? Score(x) : Score::tie();
}

Decision judge_presentation(gateway::Gateway& gateway, const std::string& judge, const Vibe& vibe,
                            std::string_view prompt, std::string_view first, std::string_view second,
                            CallAudit* audit) {
  gateway::ChatRequest request;
  request.model = judge;
  request.system = std::string(prompts::kRankerSystem);
  request.user = prompts::ranker(vibe, prompt, first, second);

  std::string text = gateway.chat(request).text;
  if (audit) audit->rationale_digest = gateway::sha256_hex(text).substr(0, 16);
  try {
    return parse_verdict(text).decision;
  } catch (const UnparseableVerdict&) {
  }

  gateway::ChatRequest retry = request;
  retry.user = prompts::repair(request.user, text, prompts::kVerdictRepair);
  std::string again = gateway.chat(retry).text;
  if (audit) {
    audit->repaired = true;
    audit->rationale_digest = gateway::sha256_hex(again).substr(0, 16);
  }
  try {
    return parse_verdict(again).decision;
  } catch (const UnparseableVerdict&) {
    if (audit) audit->unparseable = true;
    return Decision::NotApplicable;
  }
}

Score judge_cell(gateway::Gateway& gateway, const ComparisonRecord& record, const Vibe& vibe,
                 const std::string& judge) {
  Decision ab = judge_presentation(gateway, judge, vibe, record.prompt, record.output_a, record.output_b);
  Decision ba = judge_presentation(gateway, judge, vibe, record.prompt, record.output_b, record.output_a);
  return debias(ab, ba);
}

ScoreMatrix score_dataset(gateway::Gateway& gateway, std::span<const ComparisonRecord> records,
                          std::span<const Vibe> vibes, std::span<const std::string> judges,
                          const ScoringOptions& options, ScoringReport* report) {
  if (vibes.empty()) throw ConfigError("score_dataset needs at least one vibe");
  if (judges.empty()) throw ConfigError("score_dataset needs at least one judge");

  std::vector<std::string> record_ids, vibe_ids;
  for (const auto& r : records) record_ids.push_back(r.id);
  for (const auto& v : vibes) vibe_ids.push_back(v.id);
  ScoreMatrix matrix(record_ids, vibe_ids, judges.size());

  const std::size_t nv = vibes.size(), nj = judges.size();
  const std::size_t tasks = records.size() * nv * nj * 2;
  std::vector<CallAudit> calls(tasks);

  parallel_for(tasks, options.workers, [&](std::size_t t) {
    const std::size_t ordering = t % 2;
    const std::size_t j = (t / 2) % nj;
    const std::size_t v = (t / 2 / nj) % nv;
    const std::size_t r = t / 2 / nj / nv;
    const ComparisonRecord& rec = records[r];
    CallAudit& audit = calls[t];
    audit.record_id = rec.id;
    audit.vibe_id = vibes[v].id;
    audit.judge = judges[j];
    audit.ordering = ordering == 0 ? Ordering::AB : Ordering::BA;
    const std::string& first = ordering == 0 ? rec.output_a : rec.output_b;
    const std::string& second = ordering == 0 ? rec.output_b : rec.output_a;
    try {
      audit.decision = judge_presentation(gateway, judges[j], vibes[v], rec.prompt, first, second, &audit);
    } catch (const AuthError&) {
      throw;
    } catch (const ProviderError& e) {
      audit.error = e.what();
    }
  });

  std::size_t unparseable = 0, repaired = 0, failed = 0;
  for (std::size_t t = 0; t < tasks; t += 2) {
    const CallAudit& ab = calls[t];
    const CallAudit& ba = calls[t + 1];
    unparseable += ab.unparseable + ba.unparseable;
    repaired += ab.repaired + ba.repaired;
    failed += !ab.decision + !ba.decision;
    if (!ab.decision || !ba.decision) continue;
    const std::size_t j = (t / 2) % nj;
    const std::size_t v = (t / 2 / nj) % nv;
    const std::size_t r = t / 2 / nj / nv;
    matrix.set(r, v, j, debias(*ab.decision, *ba.decision));
  }

  const std::size_t missing = matrix.missing_count();
  if (report) {
    report->calls = std::move(calls);
    report->unparseable = unparseable;
    report->repaired = repaired;
    report->failed_calls = failed;
    report->missing_cells = missing;
  }
  if (unparseable) spdlog::warn("{} judge responses stayed unparseable after repair and were scored 0", unparseable);
  const double fraction = matrix.cell_count() ? static_cast<double>(missing) / matrix.cell_count() : 0.0;
  if (fraction > options.max_missing_fraction)
    throw DataQualityError(std::to_string(missing) + " of " + std::to_string(matrix.cell_count()) +
                           " score cells failed, above the allowed fraction " +
                           std::to_string(options.max_missing_fraction));
  if (missing) spdlog::warn("{} of {} score cells are missing", missing, matrix.cell_count());
  return matrix;
}

}  // namespace vibecheck::judging
