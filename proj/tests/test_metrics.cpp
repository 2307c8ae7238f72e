#include <gtest/gtest.h>

#include "vibecheck/errors.hpp"
#include "vibecheck/stats/metrics.hpp"

using namespace vibecheck;

namespace {

VibeStats stat(std::string id, double kappa, double sep) {
  VibeStats s;
  s.vibe_id = std::move(id);
  s.kappa = kappa;
  s.sep_score = sep;
  return s;
}

ScoreMatrix filled(const std::vector<std::vector<int>>& rows) {
  std::vector<std::string> recs, vibes;
  for (std::size_t r = 0; r < rows.size(); ++r) recs.push_back("r" + std::to_string(r));
  for (std::size_t v = 0; v < rows[0].size(); ++v) vibes.push_back("v" + std::to_string(v));
  ScoreMatrix m(recs, vibes, 2);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t v = 0; v < rows[r].size(); ++v)
      if (rows[r][v] != 9)
        for (std::size_t j = 0; j < 2; ++j) m.set(r, v, j, Score(rows[r][v]));
  return m;
}

}  // namespace

TEST(Sep, MeanOfScores) {
  const std::vector<Score> s = {Score(1), Score(1), Score(0), Score(-1)};
  EXPECT_DOUBLE_EQ(stats::sep_score(s), 0.25);
  EXPECT_THROW(stats::sep_score(std::vector<Score>{}), EmptyInput);
}

TEST(Filter, BoundariesAreInclusive) {
  EXPECT_FALSE(stats::passes_filter(stat("a", 0.19, 0.5), 0.2, 0.05));
  EXPECT_FALSE(stats::passes_filter(stat("b", 0.5, 0.04), 0.2, 0.05));
  EXPECT_FALSE(stats::passes_filter(stat("c", 0.5, -0.04), 0.2, 0.05));
  EXPECT_TRUE(stats::passes_filter(stat("d", 0.2, 0.05), 0.2, 0.05));
  EXPECT_TRUE(stats::passes_filter(stat("e", 0.2, -0.05), 0.2, 0.05));
  // Values computed in binary, e.g. 1 - 0.8 or 0.15 + 0.05.
  EXPECT_TRUE(stats::passes_filter(stat("f", 1.0 - 0.8, 0.15 - 0.1), 0.2, 0.05));
  RunConfig c;
  const std::vector<VibeStats> all = {stat("x", 0.9, 0.3), stat("y", 0.1, 0.3), stat("z", 0.9, -0.2)};
  EXPECT_EQ(stats::filter_vibes(all, c), (std::vector<std::string>{"x", "z"}));
}

TEST(Describe, KappaSepAndCounts) {
  const auto m = filled({{1, 0}, {1, 9}, {-1, 0}, {1, 0}});
  const auto d = stats::describe_vibes(m);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].sep_score, 0.5);
  EXPECT_EQ(d[0].n_scored, 4u);
  EXPECT_EQ(d[1].n_scored, 3u);
  EXPECT_DOUBLE_EQ(d[0].kappa, 1.0);
}

TEST(Features, MissingCellsImputeZero) {
  const auto m = filled({{1, 9}, {-1, 1}});
  std::size_t imputed = 0;
  const Eigen::MatrixXd X = stats::score_features(m, &imputed);
  EXPECT_EQ(imputed, 1u);
  EXPECT_EQ(X(0, 1), 0.0);
  EXPECT_EQ(X(1, 0), -1.0);
}

TEST(Features, ModelMatchingTableInterleavesBothOrders) {
  const auto m = filled({{1, 0}, {-1, 1}});
  const auto t = stats::build_mm_features(m);
  ASSERT_EQ(t.rows(), 4u);
  EXPECT_DOUBLE_EQ(t.row_weight, 0.5);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(t.y[2 * i], 1.0);
    EXPECT_EQ(t.y[2 * i + 1], -1.0);
    EXPECT_TRUE(t.X.row(2 * i + 1).isApprox(-t.X.row(2 * i)) || t.X.row(2 * i).isZero());
  }
  EXPECT_EQ(t.columns, m.vibes());
}

TEST(Features, PreferenceTableSkipsUnlabeled) {
  const auto m = filled({{1}, {-1}, {1}});
  const std::vector<std::optional<Preference>> prefs = {Preference::A, std::nullopt, Preference::B};
  const auto t = stats::build_pp_features(m, prefs);
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.y[0], 1.0);
  EXPECT_EQ(t.y[1], -1.0);
  EXPECT_DOUBLE_EQ(t.row_weight, 1.0);
}
