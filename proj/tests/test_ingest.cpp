#include <gtest/gtest.h>

#include <map>
#include <memory>

#include "planted.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/gateway/gateway.hpp"
#include "vibecheck/gateway/mock_provider.hpp"
#include "vibecheck/ingest.hpp"

using namespace vibecheck;
using ingest::Vote;

namespace {

std::unique_ptr<gateway::Gateway> mock(const std::string& rules) {
  gateway::GatewayOptions o;
  o.concurrency = 4;
  auto gw = std::make_unique<gateway::Gateway>(std::move(o));
  gw->set_catch_all(std::make_shared<gateway::MockProvider>(gateway::MockRules::parse(rules)));
  return gw;
}

}  // namespace

TEST(ParseDataset, ReadsHeaderRecordsAndDropsTies) {
  const std::string body =
      R"({"schema_version":1,"model_a":"alpha","model_b":"beta"})"
      "\n"
      R"({"id":"1","prompt":"p","output_a":"a","output_b":"b","preference":"a"})"
      "\n\n"
      R"({"id":"2","prompt":"p","output_a":"a","output_b":"b","preference":"TIE"})"
      "\n"
      R"({"id":"3","prompt":"p","output_a":"a","output_b":"b","topic":"stem","meta":{"k":"v"}})"
      "\n";
  ingest::LoadReport rep;
  const auto d = ingest::parse_dataset(body, &rep);
  EXPECT_EQ(d.model_a_name, "alpha");
  ASSERT_EQ(d.records.size(), 2u);
  EXPECT_EQ(rep.ties_dropped, 1u);
  EXPECT_EQ(d.records[0].preference, Preference::A);
  EXPECT_FALSE(d.records[1].preference);
  EXPECT_EQ(d.records[1].topic, "stem");
  EXPECT_EQ(d.records[1].meta.at("k"), "v");
  EXPECT_EQ(d.labeled_count(), 1u);
}

TEST(ParseDataset, ErrorsNameTheLine) {
  try {
    ingest::parse_dataset("{\"id\":\"1\",\"prompt\":\"p\",\"output_a\":\"a\",\"output_b\":\"b\"}\n{\"id\":\"2\"}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ingest::parse_dataset("not json\n"), ParseError);
  EXPECT_THROW(ingest::parse_dataset(R"({"id":"1","prompt":"p","output_a":"a","output_b":"b"})"
                                     "\n"
                                     R"({"id":"1","prompt":"p","output_a":"a","output_b":"b"})"),
               DuplicateId);
  EXPECT_THROW(ingest::parse_dataset(""), EmptyDataset);
  EXPECT_THROW(ingest::parse_dataset(R"({"id":"1","prompt":"p","output_a":"a","output_b":"b","preference":"x"})"),
               ParseError);
}

TEST(ParseDataset, SerializeRoundTrips) {
  fixtures::PlantedOptions o;
  o.records = 30;
  o.preferences = true;
  auto d = fixtures::planted_corpus(o);
  d.records[3].topic = "writing";
  d.records[4].meta["source"] = "x\"y";
  EXPECT_EQ(ingest::parse_dataset(ingest::serialize_dataset(d)), d);
  const auto path = fixtures::scratch_dir("ingest-save") / "d.jsonl";
  ingest::save_dataset(d, path);
  EXPECT_EQ(ingest::load_dataset(path), d);
  EXPECT_THROW(ingest::load_dataset(path.parent_path() / "absent.jsonl"), IoError);
}

TEST(Split, StratifiedDeterministicAndDisjoint) {
  fixtures::PlantedOptions o;
  o.records = 101;
  o.preferences = true;
  auto d = fixtures::planted_corpus(o);
  for (std::size_t i = 0; i < 11; ++i) d.records[i].preference.reset();
  const auto s1 = ingest::split_dataset(d, 0.5, 3), s2 = ingest::split_dataset(d, 0.5, 3);
  const auto s3 = ingest::split_dataset(d, 0.5, 4);
  EXPECT_EQ(s1.train, s2.train);
  EXPECT_NE(s1.train, s3.train);
  EXPECT_EQ(s1.train.records.size() + s1.validation.records.size(), d.records.size());
  std::map<std::string, int> where;
  for (const auto& r : s1.train.records) where[r.id] += 1;
  for (const auto& r : s1.validation.records) where[r.id] += 2;
  for (const auto& [id, w] : where) EXPECT_TRUE(w == 1 || w == 2) << id;
  auto count = [](const ingest::Dataset& x, std::optional<Preference> p) {
    std::size_t n = 0;
    for (const auto& r : x.records) n += r.preference == p;
    return n;
  };
  for (auto p : {std::optional(Preference::A), std::optional(Preference::B), std::optional<Preference>()}) {
    const double total = static_cast<double>(count(d, p));
    EXPECT_NEAR(static_cast<double>(count(s1.train, p)), 0.5 * total, 1.0);
  }
  EXPECT_EQ(s1.train.model_a_name, d.model_a_name);
}

TEST(Split, TooFewRecordsThrows) {
  fixtures::PlantedOptions o;
  o.records = 1;
  EXPECT_THROW(ingest::split_dataset(fixtures::planted_corpus(o), 0.5, 0), TooFewRecords);
}

TEST(Preferences, VoteAndEnsembleRules) {
  EXPECT_EQ(ingest::judge_vote(Decision::FirstHigher, Decision::SecondHigher), Vote::A);
  EXPECT_EQ(ingest::judge_vote(Decision::SecondHigher, Decision::FirstHigher), Vote::B);
  EXPECT_EQ(ingest::judge_vote(Decision::FirstHigher, Decision::FirstHigher), Vote::Tie);
  EXPECT_EQ(ingest::judge_vote(Decision::NotApplicable, Decision::SecondHigher), Vote::Tie);
  EXPECT_EQ(ingest::ensemble_label(Vote::A, Vote::A), Preference::A);
  EXPECT_EQ(ingest::ensemble_label(Vote::B, Vote::B), Preference::B);
  EXPECT_FALSE(ingest::ensemble_label(Vote::A, Vote::B));
  EXPECT_FALSE(ingest::ensemble_label(Vote::Tie, Vote::A));
  EXPECT_FALSE(ingest::ensemble_label(Vote::Tie, Vote::Tie));
}

TEST(Preferences, LabelsAgreeingRecordsOnly) {
  RunConfig config;
  config.preference_judge_models = {"pj1", "pj2"};
  auto gw = mock("prefer pj1 . has:##\nprefer pj2 conflict -has:##\nprefer pj2 . has:##\n");
  ingest::Dataset d;
  d.records = {{"1", "agree", "## a", "b", std::nullopt, std::nullopt, {}},
               {"2", "agree", "a", "## b", std::nullopt, std::nullopt, {}},
               {"3", "conflict", "## a", "b", std::nullopt, std::nullopt, {}},
               {"4", "agree", "a", "b", std::nullopt, std::nullopt, {}}};
  ingest::LabelReport rep;
  const auto out = ingest::generate_preferences(d, *gw, config, &rep);
  ASSERT_EQ(out.records.size(), 2u);
  EXPECT_EQ(out.records[0].preference, Preference::A);
  EXPECT_EQ(out.records[1].preference, Preference::B);
  EXPECT_EQ(rep.dropped_conflict, 1u);
  EXPECT_EQ(rep.dropped_tie, 1u);
  EXPECT_EQ(rep.votes.size(), 4u);
}

TEST(Topics, ParseCategoryAndFilter) {
  EXPECT_EQ(ingest::parse_category("Reasoning...\nCategory: STEM"), "stem");
  EXPECT_EQ(ingest::parse_category("category: writing\nCategory: Other"), "other");
  EXPECT_EQ(ingest::parse_category("no idea"), "other");
  auto gw = mock("route * equation Category: STEM\nroute * poem Category: Writing\nfixed * Category: neither\n");
  RunConfig config;
  ingest::Dataset d;
  d.records = {{"1", "solve this equation", "a", "b", std::nullopt, std::nullopt, {}},
               {"2", "write a poem", "a", "b", std::nullopt, std::nullopt, {}},
               {"3", "hello", "a", "b", std::nullopt, std::nullopt, {}}};
  const auto tagged = ingest::categorize_prompts(d, *gw, config);
  EXPECT_EQ(tagged.records[0].topic, "stem");
  EXPECT_EQ(tagged.records[1].topic, "writing");
  EXPECT_EQ(tagged.records[2].topic, "other");
  EXPECT_EQ(ingest::filter_topic(tagged, "stem").records.size(), 1u);
  EXPECT_EQ(ingest::filter_topic(tagged, "all").records.size(), 3u);
}
