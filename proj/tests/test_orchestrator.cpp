#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <set>

#include "planted.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/gateway/gateway.hpp"
#include "vibecheck/gateway/mock_provider.hpp"
#include "vibecheck/orchestrator.hpp"
#include "vibecheck/presets.hpp"

using namespace vibecheck;
namespace orch = vibecheck::orchestrator;

namespace {

std::unique_ptr<gateway::Gateway> mock_gateway(const std::string& rules, std::size_t concurrency = 4) {
  gateway::GatewayOptions o;
  o.concurrency = concurrency;
  auto gw = std::make_unique<gateway::Gateway>(std::move(o));
  gw->set_catch_all(std::make_shared<gateway::MockProvider>(gateway::MockRules::parse(rules)));
  return gw;
}

ingest::Split planted_split(bool preferences = false, std::size_t n = 200) {
  fixtures::PlantedOptions o;
  o.records = n;
  o.preferences = preferences;
  return ingest::split_dataset(fixtures::planted_corpus(o), 0.5, 0);
}

std::set<std::string> names(const std::vector<Vibe>& vibes) {
  std::set<std::string> out;
  for (const auto& v : vibes) out.insert(v.name);
  return out;
}

}  // namespace

TEST(Orchestrator, FirstPassAcceptsPlantedTraits) {
  auto gw = mock_gateway(fixtures::read_fixture("planted_rules.txt"));
  RunConfig config;
  const auto split = planted_split();
  orch::IterationRecord rec;
  auto state = orch::run_iteration(*gw, config, split, {}, &rec);
  EXPECT_EQ(state.iteration, 1);
  EXPECT_EQ(rec.sample_ids.size(), config.d);
  const auto accepted = names(state.vibes);
  EXPECT_TRUE(accepted.count("Section Headers"));
  EXPECT_TRUE(accepted.count("First-Person Voice"));
  EXPECT_TRUE(accepted.count("Emoji Use"));
  EXPECT_FALSE(accepted.count("Markdown Structure"));
  for (const auto& v : state.vibes) EXPECT_EQ(v.id.rfind("it0_v", 0), 0u) << v.id;
  ASSERT_TRUE(state.mm_model);
  EXPECT_GT(state.train_mm_accuracy, 0.9);
  EXPECT_EQ(state.stats.size(), state.vibes.size());
}

TEST(Orchestrator, PipelineFinalizesWithHeldOutStatistics) {
  auto gw = mock_gateway(fixtures::read_fixture("planted_rules.txt"));
  RunConfig config;
  const auto split = planted_split(true);
  const auto out = orch::run_pipeline(*gw, config, split);
  ASSERT_FALSE(out.final.rows.empty());
  EXPECT_LE(out.iterations.size(), config.iterations);
  for (std::size_t i = 1; i < out.final.rows.size(); ++i)
    EXPECT_GE(std::fabs(out.final.rows[i - 1].heldout.sep_score), std::fabs(out.final.rows[i].heldout.sep_score));
  EXPECT_EQ(out.final.validation_matrix.records().size(), split.validation.records.size());
  ASSERT_TRUE(out.final.pp_accuracy);
  EXPECT_GT(*out.final.pp_accuracy, 0.7);
  for (const auto& row : out.final.rows) {
    EXPECT_LE(row.exemplars_high.size(), orch::kExemplarsPerDirection);
    EXPECT_LE(row.exemplars_low.size(), orch::kExemplarsPerDirection);
  }
}
