#pragma once

#include <filesystem>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/gateway/provider.hpp"

namespace vibecheck::gateway {

/// A scalar read off one output text; the mock compares it across the two
/// outputs of a pair.
struct TextFeature {
  enum class Kind { Length, Count, Has, Contains };
  Kind kind = Kind::Length;
  std::string argument;
  std::regex pattern;

  static TextFeature parse(std::string_view token);
  double evaluate(std::string_view text) const;
};

/// How a judge rule answers: by comparing a feature, or by a fixed position.
struct Comparator {
  enum class Kind { Feature, AlwaysFirst, AlwaysSecond, NotApplicable };
  Kind kind = Kind::NotApplicable;
  TextFeature feature;
  bool inverted = false;

  static Comparator parse(std::string_view token);
  /// +1 when the first output wins, -1 when the second does, 0 otherwise.
  int compare(std::string_view first, std::string_view second) const;
};

/// One line of a mock rules file.
///
///   fixed   MODEL TEXT...                 always answer TEXT
///   route   MODEL REGEX TEXT...           answer TEXT when REGEX occurs in the user prompt
///   judge   MODEL AXIS-REGEX COMPARATOR   ranker prompts whose axis name matches
///   prefer  MODEL PROMPT-REGEX COMPARATOR preference prompts whose record prompt matches
///   propose MODEL SCOPE FEATURE AXIS...   emit AXIS when FEATURE differs in any sample
///   reduce  MODEL echo                    echo reduction, final-reduction and dedup prompts
///   alias   REGEX CANONICAL...            embed CANONICAL instead of texts matching REGEX
///
/// MODEL is a glob over the full model identifier, SCOPE is one of any,
/// initial or iteration, FEATURE is length, count:RE, has:RE or contains:TEXT,
/// and COMPARATOR is a FEATURE (prefixed with '-' to invert), first, second or
/// na. TEXT fields expand \n escapes. Lines starting with '#' are comments.
struct MockRule {
  enum class Kind { Fixed, Route, Judge, Prefer, Propose, Reduce, Alias };
  enum class Scope { Any, Initial, Iteration };

  Kind kind = Kind::Fixed;
  std::string model_glob;
  std::regex pattern;
  std::string pattern_text;
  std::string text;
  Comparator comparator;
  TextFeature feature;
  Scope scope = Scope::Any;
  std::size_t line = 0;
};

struct MockRules {
  std::vector<MockRule> rules;
  std::string source;

  /// Throws ConfigError naming the offending line.
  static MockRules parse(std::string_view text);
  static MockRules load(const std::filesystem::path& path);
};

bool glob_match(std::string_view pattern, std::string_view text);

/// Deterministic offline provider driven by MockRules. Answers are a pure
/// function of the request and the rules; embeddings are signed hashed bags of
/// lower-cased words, so texts equal up to whitespace embed identically.
class MockProvider final : public Provider {
 public:
  explicit MockProvider(MockRules rules, std::size_t dimension = 256);

  /// "mock:<digest of the rules>", so cached answers never outlive a rules edit.
  std::string_view name() const override { return name_; }
  ChatResponse chat(const ChatRequest& request) override;
  std::vector<Embedding> embed(std::span<const std::string> texts, const std::string& model) override;

  Embedding embed_one(std::string_view text) const;

 private:
  std::string answer(const ChatRequest& request) const;

  MockRules rules_;
  std::size_t dimension_;
  std::string name_;
};

}  // namespace vibecheck::gateway
