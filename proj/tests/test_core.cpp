#include <gtest/gtest.h>

#include <cmath>

#include "vibecheck/core.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/random.hpp"

using namespace vibecheck;

TEST(Score, RejectsValuesOutsideRange) {
  EXPECT_THROW(Score(2), std::invalid_argument);
  EXPECT_THROW(Score(-2), std::invalid_argument);
  EXPECT_EQ(Score(-1).value(), -1);
  EXPECT_EQ((-Score::a_higher()), Score::b_higher());
}

TEST(Score, TwoJudgeAggregationMatchesRoundedMean) {
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      const Score s[] = {Score(a), Score(b)};
      // Round half away from zero, so 0.5 -> 1 and -0.5 -> -1.
      const int expected = static_cast<int>(std::round((a + b) / 2.0));
      EXPECT_EQ(aggregate_scores(s).value(), expected) << a << "," << b;
    }
}

TEST(Score, NegationIsElementwise) {
  const std::vector<Score> in = {Score(1), Score(0), Score(-1)};
  const auto out = negate_scores(in);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], Score(-1));
  EXPECT_EQ(out[1], Score(0));
  EXPECT_EQ(out[2], Score(1));
}

TEST(Vibe, MakeVibeValidatesFields) {
  const Vibe v = make_vibe("Tone", "Flat", "Lively");
  EXPECT_EQ(v.render(), "Tone: Low: Flat; High: Lively");
  EXPECT_THROW(make_vibe("", "a", "b"), Error);
  EXPECT_THROW(make_vibe("Tone", "same", "same"), Error);
}

TEST(Record, SwappedExchangesOutputsAndPreference) {
  ComparisonRecord r{"r1", "p", "alpha", "beta", Preference::A, std::nullopt, {}};
  const auto s = swapped(r);
  EXPECT_EQ(s.output_a, "beta");
  EXPECT_EQ(s.output_b, "alpha");
  EXPECT_EQ(s.preference, Preference::B);
  EXPECT_EQ(swapped(s), r);
}

TEST(ScoreMatrix, AggregatesAndTracksMissingCells) {
  ScoreMatrix m({"r1", "r2"}, {"v1"}, 2);
  m.set(0, 0, 0, Score(1));
  m.set(0, 0, 1, Score(0));
  m.set(1, 0, 0, Score(-1));
  EXPECT_EQ(m.aggregated(0, 0), Score(1));
  EXPECT_FALSE(m.aggregated(1, 0));
  EXPECT_EQ(m.missing_count(), 1u);
  EXPECT_EQ(m.negated().aggregated(0, 0), Score(-1));
  EXPECT_EQ(m.record_index("r2"), 1u);
}

TEST(ScoreMatrix, SelectAndAppendColumns) {
  ScoreMatrix a({"r1"}, {"v1", "v2"}, 2);
  a.set(0, 1, 0, Score(1));
  a.set(0, 1, 1, Score(1));
  const std::vector<std::string> pick = {"v2"};
  const auto sel = a.select_vibes(pick);
  ASSERT_EQ(sel.vibes().size(), 1u);
  EXPECT_EQ(sel.aggregated(0, 0), Score(1));
  ScoreMatrix b({"r1"}, {"v3"}, 2);
  const auto joined = a.with_columns(b);
  EXPECT_EQ(joined.vibes().size(), 3u);
  ScoreMatrix other({"r9"}, {"v4"}, 2);
  EXPECT_THROW(a.with_columns(other), std::exception);
}

TEST(RunConfig, DefaultsValidateAndBadValuesThrow) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.iterations, 3u);
  c.train_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.judge_models = {"only-one"};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Random, PermutationIsDeterministicAndComplete) {
  auto r1 = stream(7, 1), r2 = stream(7, 1), r3 = stream(7, 2);
  const auto p1 = permutation(50, r1), p2 = permutation(50, r2), p3 = permutation(50, r3);
  EXPECT_EQ(p1, p2);
  EXPECT_NE(p1, p3);
  std::vector<std::size_t> sorted = p1;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}
