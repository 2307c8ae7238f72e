#include "planted.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace vibecheck::fixtures {

namespace {

constexpr const char* kWords[] = {"the",    "method", "uses",  "a",      "simple", "table", "of",     "values",
                                  "each",   "step",   "adds",  "one",    "more",   "check", "before", "the",
                                  "result", "is",     "read",  "and",    "stored", "later", "runs",   "reuse",
                                  "this",   "cached", "value", "so",     "work",   "stays", "small",  "overall"};
constexpr const char* kTopics[] = {"sorting lists", "baking bread", "writing a poem", "solving an equation",
                                   "planning a trip", "tuning a guitar", "reading a map", "training a dog"};
constexpr const char* kHeader = "## Overview\n\n";
constexpr const char* kEmoji = " \xF0\x9F\x99\x82";  // U+1F642
constexpr const char* kNoise = "Notably, ";

std::string sentence(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(6, 12), word(0, std::size(kWords) - 1);
  std::string s;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[word(rng)];
  }
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

std::string output(std::mt19937_64& rng, const std::array<bool, 3>& traits, bool noise) {
  std::uniform_int_distribution<int> count(2, 4);
  std::string body;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    if (i) body += ' ';
    body += sentence(rng);
  }
  if (traits[1]) body = "I think " + std::string(1, static_cast<char>(std::tolower(body[0]))) + body.substr(1);
  if (noise) body = kNoise + body;
  if (traits[0]) body = kHeader + body;
  if (traits[2]) body += kEmoji;
  return body;
}

}  // namespace

std::array<bool, 3> planted_traits(const std::string& text) {
  return {text.find("##") != std::string::npos, text.find("I think") != std::string::npos,
          text.find(kEmoji) != std::string::npos};
}

ingest::Dataset planted_corpus(const PlantedOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::bernoulli_distribution noise(o.noise_rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ingest::Dataset data;
  data.model_a_name = "planted-a";
  data.model_b_name = "planted-b";
  for (std::size_t i = 0; i < o.records; ++i) {
    ComparisonRecord r;
    char id[16];
    std::snprintf(id, sizeof id, "r%03zu", i);
    r.id = id;
    r.prompt = "Explain " + std::string(kTopics[i % std::size(kTopics)]) + " (case " + std::to_string(i) + ").";
    std::array<bool, 3> ta{}, tb{};
    for (std::size_t k = 0; k < 3; ++k) {
      ta[k] = unit(rng) < o.rate_a[k];
      tb[k] = unit(rng) < o.rate_b[k];
    }
    const bool na = noise(rng), nb = noise(rng);
    r.output_a = output(rng, ta, na);
    r.output_b = output(rng, tb, nb);
    if (o.preferences) {
      const double s1 = static_cast<double>(ta[0]) - static_cast<double>(tb[0]);
      const double p = 1.0 / (1.0 + std::exp(-o.slope * s1));
      r.preference = unit(rng) < p ? Preference::A : Preference::B;
    }
    data.records.push_back(std::move(r));
  }
  return data;
}

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(VIBECHECK_FIXTURE_DIR) / name;
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vibecheck-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace vibecheck::fixtures
