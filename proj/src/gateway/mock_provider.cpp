#include "vibecheck/gateway/mock_provider.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "vibecheck/axis_format.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/prompts.hpp"
#include "vibecheck/text.hpp"

namespace vibecheck::gateway {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::regex compile(std::string_view pattern, std::size_t line) {
  try {
    return std::regex(std::string(pattern), std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError("mock rules line " + std::to_string(line) + ": bad regex \"" + std::string(pattern) +
                      "\": " + e.what());
  }
}

// Splits off `count` whitespace-separated tokens; the rest of the line is
// returned through `rest`.
std::vector<std::string> take_tokens(std::string_view line, std::size_t count, std::string& rest) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (tokens.size() < count) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    tokens.emplace_back(line.substr(start, i - start));
  }
  rest = std::string(text::trim(line.substr(std::min(i, line.size()))));
  return tokens;
}

std::string verdict_text(int outcome, double first, double second, bool preference) {
  std::ostringstream out;
  out << "Analysis: the first output measures " << first << " and the second measures " << second << ".\n\n";
  if (outcome > 0) out << "Model: A";
  else if (outcome < 0) out << "Model: B";
  else out << (preference ? "Model: tie" : "N/A");
  return out.str();
}

std::string axis_name_of(std::string_view rendered) {
  try {
    return parse_axis(rendered).name;
  } catch (const AxisParseError&) {
    return std::string(rendered);
  }
}

std::vector<Vibe> parse_block(std::string_view user, std::string_view tag) {
  std::vector<Vibe> out;
  for (const auto& line : prompts::axis_block(user, tag)) {
    try {
      out.push_back(parse_axis(line));
    } catch (const AxisParseError&) {
    }
  }
  return out;
}

std::vector<Vibe> unique_by_name(std::vector<Vibe> axes, std::unordered_set<std::string> seen = {}) {
  std::vector<Vibe> out;
  for (auto& v : axes)
    if (seen.insert(axis_name_key(v.name)).second) out.push_back(std::move(v));
  return out;
}

}  // namespace

// --- features ----------------------------------------------------------------

TextFeature TextFeature::parse(std::string_view token) {
  TextFeature f;
  auto arg_after = [&](std::string_view prefix) { return std::string(token.substr(prefix.size())); };
  if (token == "length") {
    f.kind = Kind::Length;
  } else if (token.starts_with("count:")) {
    f.kind = Kind::Count;
    f.argument = arg_after("count:");
    f.pattern = compile(f.argument, 0);
  } else if (token.starts_with("has:")) {
    f.kind = Kind::Has;
    f.argument = arg_after("has:");
    f.pattern = compile(f.argument, 0);
  } else if (token.starts_with("contains:")) {
    f.kind = Kind::Contains;
    f.argument = text::unescape(arg_after("contains:"));
  } else {
    throw ConfigError("unknown mock feature \"" + std::string(token) + "\"");
  }
  return f;
}

double TextFeature::evaluate(std::string_view s) const {
  switch (kind) {
    case Kind::Length: return static_cast<double>(s.size());
    case Kind::Count: {
      auto begin = std::cregex_iterator(s.data(), s.data() + s.size(), pattern);
      return static_cast<double>(std::distance(begin, std::cregex_iterator()));
    }
    case Kind::Has: return std::regex_search(s.begin(), s.end(), pattern) ? 1.0 : 0.0;
    case Kind::Contains: return s.find(argument) != std::string_view::npos ? 1.0 : 0.0;
  }
  return 0.0;
}

Comparator Comparator::parse(std::string_view token) {
  Comparator c;
  if (token == "first") {
    c.kind = Kind::AlwaysFirst;
  } else if (token == "second") {
    c.kind = Kind::AlwaysSecond;
  } else if (token == "na") {
    c.kind = Kind::NotApplicable;
  } else {
    c.kind = Kind::Feature;
    if (!token.empty() && token.front() == '-') {
      c.inverted = true;
      token.remove_prefix(1);
    }
    c.feature = TextFeature::parse(token);
  }
  return c;
}

int Comparator::compare(std::string_view first, std::string_view second) const {
  switch (kind) {
    case Kind::AlwaysFirst: return 1;
    case Kind::AlwaysSecond: return -1;
    case Kind::NotApplicable: return 0;
    case Kind::Feature: {
      double a = feature.evaluate(first);
      double b = feature.evaluate(second);
      int c = (a > b) - (a < b);
      return inverted ? -c : c;
    }
  }
  return 0;
}

// --- rules -------------------------------------------------------------------

bool glob_match(std::string_view pattern, std::string_view s) {
  // Iterative wildcard match with single-star backtracking.
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < s.size()) {
    if (p < pattern.size() && (pattern[p] == s[t] || pattern[p] == '?')) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

MockRules MockRules::parse(std::string_view body) {
  MockRules out;
  out.source = std::string(body);
  std::size_t number = 0;
  for (std::string_view raw : text::split_lines(body)) {
    ++number;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    auto fail = [&](const std::string& why) -> ConfigError {
      return ConfigError("mock rules line " + std::to_string(number) + ": " + why);
    };
    std::string rest;
    auto head = take_tokens(line, 1, rest);
    const std::string& kind = head.at(0);
    MockRule rule;
    rule.line = number;
    try {
      if (kind == "fixed") {
        auto t = take_tokens(rest, 1, rest);
        if (t.size() < 1 || rest.empty()) throw fail("expected: fixed MODEL TEXT");
        rule.kind = MockRule::Kind::Fixed;
        rule.model_glob = t[0];
        rule.text = text::unescape(rest);
      } else if (kind == "route") {
        auto t = take_tokens(rest, 2, rest);
        if (t.size() < 2 || rest.empty()) throw fail("expected: route MODEL REGEX TEXT");
        rule.kind = MockRule::Kind::Route;
        rule.model_glob = t[0];
        rule.pattern_text = t[1];
        rule.pattern = compile(t[1], number);
        rule.text = text::unescape(rest);
      } else if (kind == "judge" || kind == "prefer") {
        auto t = take_tokens(rest, 3, rest);
        if (t.size() < 3) throw fail("expected: " + kind + " MODEL REGEX COMPARATOR");
        rule.kind = kind == "judge" ? MockRule::Kind::Judge : MockRule::Kind::Prefer;
        rule.model_glob = t[0];
        rule.pattern_text = t[1];
        rule.pattern = compile(t[1], number);
        rule.comparator = Comparator::parse(t[2]);
      } else if (kind == "propose") {
        auto t = take_tokens(rest, 3, rest);
        if (t.size() < 3 || rest.empty()) throw fail("expected: propose MODEL SCOPE FEATURE AXIS");
        rule.kind = MockRule::Kind::Propose;
        rule.model_glob = t[0];
        if (t[1] == "any") rule.scope = MockRule::Scope::Any;
        else if (t[1] == "initial") rule.scope = MockRule::Scope::Initial;
        else if (t[1] == "iteration") rule.scope = MockRule::Scope::Iteration;
        else throw fail("scope must be any, initial or iteration");
        rule.feature = TextFeature::parse(t[2]);
        rule.text = text::unescape(rest);
        parse_axis(rule.text);
      } else if (kind == "reduce") {
        auto t = take_tokens(rest, 2, rest);
        if (t.size() < 2 || t[1] != "echo") throw fail("expected: reduce MODEL echo");
        rule.kind = MockRule::Kind::Reduce;
        rule.model_glob = t[0];
      } else if (kind == "alias") {
        auto t = take_tokens(rest, 1, rest);
        if (t.size() < 1 || rest.empty()) throw fail("expected: alias REGEX CANONICAL");
        rule.kind = MockRule::Kind::Alias;
        rule.pattern_text = t[0];
        rule.pattern = compile(t[0], number);
        rule.text = text::unescape(rest);
      } else {
        throw fail("unknown rule kind \"" + kind + "\"");
      }
    } catch (const ConfigError& e) {
      std::string what = e.what();
      if (what.rfind("mock rules line", 0) == 0) throw;
      throw fail(what);
    } catch (const AxisParseError& e) {
      throw fail(std::string("propose axis is malformed: ") + e.what());
    }
    out.rules.push_back(std::move(rule));
  }
  return out;
}

MockRules MockRules::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read mock rules file " + path.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(body);
}

// --- provider ----------------------------------------------------------------

MockProvider::MockProvider(MockRules rules, std::size_t dimension)
    : rules_(std::move(rules)), dimension_(dimension == 0 ? 256 : dimension) {
  name_ = "mock:" + sha256_hex(rules_.source).substr(0, 16);
}

ChatResponse MockProvider::chat(const ChatRequest& request) {
  ChatResponse r;
  r.text = answer(request);
  return r;
}

std::string MockProvider::answer(const ChatRequest& request) const {
  using prompts::Kind;
  const std::string& user = request.user;
  const Kind kind = prompts::detect_kind(user);

  for (std::size_t i = 0; i < rules_.rules.size(); ++i) {
    const MockRule& rule = rules_.rules[i];
    if (rule.kind == MockRule::Kind::Alias || !glob_match(rule.model_glob, request.model)) continue;

    switch (rule.kind) {
      case MockRule::Kind::Fixed: return rule.text;

      case MockRule::Kind::Route:
        if (std::regex_search(user, rule.pattern)) return rule.text;
        break;

      case MockRule::Kind::Judge: {
        if (kind != Kind::Ranker) break;
        auto axis = prompts::ranker_axis(user);
        auto sample = prompts::pair(user);
        if (!axis || !sample) break;
        if (!std::regex_search(axis_name_of(*axis), rule.pattern)) break;
        int outcome = rule.comparator.compare(sample->first, sample->second);
        double a = rule.comparator.kind == Comparator::Kind::Feature ? rule.comparator.feature.evaluate(sample->first) : 0;
        double b = rule.comparator.kind == Comparator::Kind::Feature ? rule.comparator.feature.evaluate(sample->second) : 0;
        return verdict_text(outcome, a, b, false);
      }

      case MockRule::Kind::Prefer: {
        if (kind != Kind::Preference) break;
        auto sample = prompts::pair(user);
        if (!sample || !std::regex_search(sample->prompt, rule.pattern)) break;
        int outcome = rule.comparator.compare(sample->first, sample->second);
        double a = rule.comparator.kind == Comparator::Kind::Feature ? rule.comparator.feature.evaluate(sample->first) : 0;
        double b = rule.comparator.kind == Comparator::Kind::Feature ? rule.comparator.feature.evaluate(sample->second) : 0;
        return verdict_text(outcome, a, b, true);
      }

      case MockRule::Kind::Propose: {
        if (kind != Kind::Discovery && kind != Kind::Iteration) break;
        const bool iterating = kind == Kind::Iteration;
        // Every applicable propose rule from here on contributes.
        const auto samples = prompts::samples(user);
        std::unordered_set<std::string> existing;
        if (iterating)
          for (const auto& v : parse_block(user, "existing_axes")) existing.insert(axis_name_key(v.name));
        std::vector<Vibe> emitted;
        for (std::size_t k = i; k < rules_.rules.size(); ++k) {
          const MockRule& p = rules_.rules[k];
          if (p.kind != MockRule::Kind::Propose || !glob_match(p.model_glob, request.model)) continue;
          if (p.scope == MockRule::Scope::Initial && iterating) continue;
          if (p.scope == MockRule::Scope::Iteration && !iterating) continue;
          bool differs = false;
          for (const auto& s : samples)
            if (p.feature.evaluate(s.first) != p.feature.evaluate(s.second)) differs = true;
          if (!differs) continue;
          Vibe v = parse_axis(p.text);
          if (existing.count(axis_name_key(v.name))) continue;
          emitted.push_back(std::move(v));
        }
        if (emitted.empty()) return "I could not find any clear differences between these outputs.";
        std::string out;
        if (iterating) {
          out = "New Axes:\n";
          for (const auto& v : emitted) out += "- " + v.name + ":\n    High: " + v.high + "\n    Low: " + v.low + "\n\n";
        } else {
          for (const auto& v : emitted) out += "- " + v.render() + "\n";
        }
        return std::string(text::trim(out));
      }

      case MockRule::Kind::Reduce: {
        if (kind == Kind::Reduction) {
          auto axes = unique_by_name(parse_block(user, "axes"));
          nlohmann::json list = nlohmann::json::array();
          for (const auto& v : axes) list.push_back(v.render_high_first());
          return list.dump();
        }
        if (kind == Kind::FinalReduction) {
          auto axes = unique_by_name(parse_block(user, "axes"));
          std::size_t cap = prompts::final_cap(user).value_or(axes.size());
          std::string out;
          for (std::size_t n = 0; n < axes.size() && n < cap; ++n)
            out += std::to_string(n + 1) + ". \"" + axes[n].render_high_first() + "\"\n";
          return out;
        }
        if (kind == Kind::Dedup) {
          auto existing = parse_block(user, "existing_axes");
          std::unordered_set<std::string> seen;
          std::string out;
          for (const auto& v : existing) {
            seen.insert(axis_name_key(v.name));
            out += v.render_high_first() + "\n";
          }
          for (const auto& v : unique_by_name(parse_block(user, "new_axes"), seen)) out += v.render_high_first() + "\n";
          return out;
        }
        break;
      }

      case MockRule::Kind::Alias: break;
    }
  }
  throw ProviderError("mock: no rule answers a " + std::string(prompts::to_string(kind)) + " request for model " +
                          request.model,
                      false);
}

Embedding MockProvider::embed_one(std::string_view input) const {
  std::string canonical(input);
  for (const auto& rule : rules_.rules) {
    if (rule.kind == MockRule::Kind::Alias && std::regex_search(canonical, rule.pattern)) {
      canonical = rule.text;
      break;
    }
  }
  Embedding v(dimension_, 0.0);
  std::string token;
  bool any = false;
  auto flush = [&] {
    if (token.empty()) return;
    std::uint64_t h = fnv1a(token);
    v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
    any = true;
    token.clear();
  };
  for (unsigned char c : canonical) {
    if (std::isalnum(c) || c >= 0x80) token.push_back(static_cast<char>(std::tolower(c)));
    else flush();
  }
  flush();
  if (!any) v[0] = 1.0;
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) {
    // Every token collided with an opposite sign.
    v.assign(dimension_, 0.0);
    v[fnv1a(canonical) % dimension_] = 1.0;
    sq = 1.0;
  }
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<Embedding> MockProvider::embed(std::span<const std::string> texts, const std::string&) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

}  // namespace vibecheck::gateway
