#include <gtest/gtest.h>

#include <cmath>

#include "vibecheck/axis_format.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/gateway/mock_provider.hpp"
#include "vibecheck/judging.hpp"
#include "vibecheck/prompts.hpp"

using namespace vibecheck;
using gateway::MockProvider;
using gateway::MockRules;
using prompts::Kind;

namespace {

std::vector<ComparisonRecord> two_records() {
  return {ComparisonRecord{"r1", "What is 2+2?", "## Answer\nFour", "4", std::nullopt, std::nullopt, {}},
          ComparisonRecord{"r2", "Name a colour", "Blue", "I like red", std::nullopt, std::nullopt, {}}};
}

gateway::ChatRequest chat(std::string model, std::string user) {
  gateway::ChatRequest r;
  r.model = std::move(model);
  r.user = std::move(user);
  return r;
}

}  // namespace

TEST(Prompts, EveryBuilderIsRecognised) {
  const auto recs = two_records();
  const std::vector<Vibe> axes = {make_vibe("Tone", "Flat", "Warm"), make_vibe("Depth", "Shallow", "Deep")};
  EXPECT_EQ(prompts::detect_kind(prompts::discovery(recs)), Kind::Discovery);
  EXPECT_EQ(prompts::detect_kind(prompts::iteration(recs, axes)), Kind::Iteration);
  EXPECT_EQ(prompts::detect_kind(prompts::reduction(axes)), Kind::Reduction);
  EXPECT_EQ(prompts::detect_kind(prompts::final_reduction(axes, 1)), Kind::FinalReduction);
  EXPECT_EQ(prompts::detect_kind(prompts::dedup(axes, axes)), Kind::Dedup);
  EXPECT_EQ(prompts::detect_kind(prompts::ranker(axes[0], "p", "x", "y")), Kind::Ranker);
  EXPECT_EQ(prompts::detect_kind(prompts::preference("p", "x", "y")), Kind::Preference);
  EXPECT_EQ(prompts::detect_kind(prompts::category("p")), Kind::Category);
  EXPECT_EQ(prompts::detect_kind("hello"), Kind::Unknown);
}

TEST(Prompts, RequestsCanBeReadBack) {
  const auto recs = two_records();
  const auto samples = prompts::samples(prompts::discovery(recs));
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[1].prompt, "Name a colour");
  EXPECT_EQ(samples[0].first, "## Answer\nFour");
  EXPECT_EQ(samples[1].second, "I like red");

  const Vibe v = make_vibe("Tone", "Flat", "Warm");
  const std::string ranker = prompts::ranker(v, "q", "first text", "second text");
  EXPECT_EQ(prompts::ranker_axis(ranker), v.render());
  const auto pair = prompts::pair(ranker);
  ASSERT_TRUE(pair);
  EXPECT_EQ(pair->first, "first text");
  EXPECT_EQ(pair->second, "second text");

  const std::vector<Vibe> axes = {v};
  EXPECT_EQ(prompts::final_cap(prompts::final_reduction(axes, 7)), 7u);
  EXPECT_EQ(prompts::category_question(prompts::category("Why?")), "Why?");
  const auto block = prompts::axis_block(prompts::dedup(axes, axes), "new_axes");
  ASSERT_EQ(block.size(), 1u);
}

TEST(Prompts, RepairKeepsOriginalRequest) {
  const std::string r = prompts::repair("ORIGINAL", "bad answer", prompts::kVerdictRepair);
  EXPECT_NE(r.find("ORIGINAL"), std::string::npos);
  EXPECT_NE(r.find("bad answer"), std::string::npos);
}

TEST(MockRules, ParseErrorsNameTheLine) {
  try {
    MockRules::parse("# ok\nfixed * hi\nbogus rule\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(MockRules::parse("propose * sometimes length A: Low: x; High: y"), ConfigError);
  EXPECT_THROW(MockRules::parse("propose * any length not an axis"), ConfigError);
}

TEST(MockRules, GlobMatching) {
  EXPECT_TRUE(gateway::glob_match("*", "openai/gpt-4o"));
  EXPECT_TRUE(gateway::glob_match("openai/*-mini", "openai/gpt-4o-mini"));
  EXPECT_FALSE(gateway::glob_match("openai/*-mini", "openai/gpt-4o"));
  EXPECT_TRUE(gateway::glob_match("a?c", "abc"));
}

TEST(MockProvider, JudgeComparesFeatureAcrossPresentedOutputs) {
  MockProvider mock(MockRules::parse("judge * ^Tone$ has:##\njudge * . na\n"));
  const Vibe tone = make_vibe("Tone", "Plain", "Headed");
  auto first = judging::parse_verdict(mock.chat(chat("m", prompts::ranker(tone, "q", "## x", "y"))).text);
  auto second = judging::parse_verdict(mock.chat(chat("m", prompts::ranker(tone, "q", "y", "## x"))).text);
  auto neither = judging::parse_verdict(mock.chat(chat("m", prompts::ranker(tone, "q", "y", "z"))).text);
  EXPECT_EQ(first.decision, Decision::FirstHigher);
  EXPECT_EQ(second.decision, Decision::SecondHigher);
  EXPECT_EQ(neither.decision, Decision::NotApplicable);
  const Vibe other = make_vibe("Other", "a", "b");
  EXPECT_EQ(judging::parse_verdict(mock.chat(chat("m", prompts::ranker(other, "q", "## x", "y"))).text).decision,
            Decision::NotApplicable);
}

TEST(MockProvider, ProposeRespectsScopeAndExistingAxes) {
  MockProvider mock(MockRules::parse(
      "propose * initial has:## Headers: Low: none; High: headers\n"
      "propose * iteration has:\\bI\\b Voice: Low: impersonal; High: first person\n"
      "propose * any has:## Headers: Low: none; High: headers\n"));
  const auto recs = two_records();
  const auto initial = parse_axis_list(mock.chat(chat("p", prompts::discovery(recs))).text).vibes;
  ASSERT_EQ(initial.size(), 2u);  // the "any" duplicate is emitted too
  EXPECT_EQ(initial[0].name, "Headers");
  const std::vector<Vibe> existing = {make_vibe("Headers", "none", "headers")};
  const auto later = parse_axis_list(mock.chat(chat("p", prompts::iteration(recs, existing))).text).vibes;
  ASSERT_EQ(later.size(), 1u);
  EXPECT_EQ(later[0].name, "Voice");
}

TEST(MockProvider, ReduceEchoCapsFinalReduction) {
  MockProvider mock(MockRules::parse("reduce * echo\n"));
  const std::vector<Vibe> axes = {make_vibe("A", "a0", "a1"), make_vibe("B", "b0", "b1"), make_vibe("C", "c0", "c1")};
  const auto reduced = parse_axis_list(mock.chat(chat("p", prompts::reduction(axes))).text).vibes;
  EXPECT_EQ(reduced.size(), 3u);
  const auto capped = parse_axis_list(mock.chat(chat("p", prompts::final_reduction(axes, 2))).text).vibes;
  ASSERT_EQ(capped.size(), 2u);
  EXPECT_EQ(capped[1].name, "B");
  const std::vector<Vibe> fresh = {make_vibe("A", "x", "y"), make_vibe("D", "d0", "d1")};
  const std::vector<Vibe> existing(axes.begin(), axes.begin() + 1);
  const auto dedup = parse_axis_list(mock.chat(chat("p", prompts::dedup(existing, fresh))).text).vibes;
  ASSERT_EQ(dedup.size(), 2u);
  EXPECT_EQ(dedup[1].name, "D");
}

TEST(MockProvider, MissingRuleIsANonRetryableProviderError) {
  MockProvider mock(MockRules::parse("fixed only-this hello\n"));
  EXPECT_EQ(mock.chat(chat("only-this", "x")).text, "hello");
  try {
    mock.chat(chat("other", "x"));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_FALSE(e.retryable());
  }
}

TEST(MockProvider, EmbeddingsAreUnitNormAndAliasesCollapse) {
  MockProvider mock(MockRules::parse("alias ^Markdown Canonical headers text\n"));
  const std::vector<std::string> texts = {"Markdown Structure axis", "Canonical headers text", "emoji at end",
                                          "emoji   at END"};
  const auto v = mock.embed(texts, "e");
  ASSERT_EQ(v.size(), 4u);
  for (const auto& e : v) {
    double norm = 0;
    for (double x : e) norm += x * x;
    EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-12);
  }
  EXPECT_EQ(v[0], v[1]);
  EXPECT_EQ(v[2], v[3]);
  EXPECT_NE(v[0], v[2]);
}

TEST(MockProvider, NameTracksRuleDigest) {
  MockProvider a(MockRules::parse("fixed * x\n")), b(MockRules::parse("fixed * y\n"));
  EXPECT_NE(a.name(), b.name());
  EXPECT_EQ(a.name().rfind("mock:", 0), 0u);
}
