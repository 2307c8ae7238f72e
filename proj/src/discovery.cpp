#include "vibecheck/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <spdlog/spdlog.h>
#include <unordered_set>

#include "vibecheck/axis_format.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/parallel.hpp"
#include "vibecheck/prompts.hpp"

namespace vibecheck::discovery {

namespace {

double cosine_distance(const gateway::Embedding& a, const gateway::Embedding& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 1.0;
  return 1.0 - dot / std::sqrt(na * nb);
}

std::vector<std::string> rendered(std::span<const Vibe> axes) {
  std::vector<std::string> out;
  out.reserve(axes.size());
  for (const auto& v : axes) out.push_back(v.render());
  return out;
}

std::string call_reducer(gateway::Gateway& gateway, const RunConfig& config, const std::string& user) {
  gateway::ChatRequest request;
  request.model = config.proposer_model;
  request.system = std::string(prompts::kReducerSystem);
  request.user = user;
  request.max_tokens = 2048;
  return gateway.chat(request).text;
}

// Parses a reducer answer, asking once more when nothing parses.
std::vector<Vibe> reduce_call(gateway::Gateway& gateway, const RunConfig& config, const std::string& user,
                              std::string& response) {
  response = call_reducer(gateway, config, user);
  std::vector<Vibe> axes = parse_reduced(response);
  if (!axes.empty()) return axes;
  response = call_reducer(gateway, config, prompts::repair(user, response, prompts::kReduceFormatRepair));
  axes = parse_reduced(response);
  if (axes.empty()) throw ReduceParseError("reducer output could not be parsed after one repair");
  return axes;
}

std::vector<Vibe> unique_names(std::vector<Vibe> axes) {
  std::unordered_set<std::string> seen;
  std::vector<Vibe> out;
  for (auto& v : axes)
    if (seen.insert(axis_name_key(v.name)).second) out.push_back(std::move(v));
  return out;
}

}  // namespace

Proposal propose_axes(gateway::Gateway& gateway, const RunConfig& config, std::span<const ComparisonRecord> batch,
                      std::span<const Vibe> existing, std::size_t batch_index) {
  if (batch.empty()) throw std::invalid_argument("propose_axes needs at least one record");
  gateway::ChatRequest request;
  request.model = config.proposer_model;
  request.system = std::string(prompts::kProposerSystem);
  request.user = existing.empty() ? prompts::discovery(batch) : prompts::iteration(batch, existing);
  request.temperature = config.proposer_temperature;
  request.max_tokens = 2048;

  Proposal p;
  p.batch = batch_index;
  p.response = gateway.chat(request).text;
  ParsedAxes parsed = parse_axis_list(p.response);
  if (parsed.vibes.empty()) {
    gateway::ChatRequest retry = request;
    retry.user = prompts::repair(request.user, p.response, prompts::kAxisFormatRepair);
    p.response = gateway.chat(retry).text;
    p.repaired = true;
    parsed = parse_axis_list(p.response);
  }
  if (parsed.vibes.empty())
    throw ZeroAxesParsed("proposer returned no parsable axis for batch " + std::to_string(batch_index));
  for (auto& v : parsed.vibes) {
    v.origin = VibeOrigin::Discovered;
    p.lines.push_back(RawAxis{v.render(), batch_index});
    p.axes.push_back(std::move(v));
  }
  p.rejected = std::move(parsed.rejected);
  return p;
}

std::vector<Cluster> cluster_embeddings(const std::vector<gateway::Embedding>& vectors, double threshold) {
  const std::size_t n = vectors.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = std::max(0.0, cosine_distance(vectors[i], vectors[j]));

  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[i] = {i};

  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0;
    for (std::size_t x : a)
      for (std::size_t y : b) sum += dist[x][y];
    return sum / static_cast<double>(a.size() * b.size());
  };

  while (groups.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        const double d = linkage(groups[i], groups[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    if (best > threshold) break;
    groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
    std::sort(groups[bi].begin(), groups[bi].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::vector<Cluster> out;
  for (auto& g : groups) {
    Cluster c;
    c.members = std::move(g);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : c.members) {
      double total = 0.0;
      for (std::size_t o : c.members) total += dist[m][o];
      if (total < best) {
        best = total;
        c.representative = m;
      }
    }
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members.front() < b.members.front();
  });
  return out;
}

std::vector<Cluster> cluster_axes(gateway::Gateway& gateway, const std::string& embed_model,
                                  std::span<const Vibe> axes, double threshold) {
  if (axes.empty()) throw std::invalid_argument("cluster_axes needs at least one axis");
  const auto texts = rendered(axes);
  return cluster_embeddings(gateway.embed(texts, embed_model), threshold);
}

std::vector<Vibe> parse_reduced(std::string_view response) {
  return unique_names(parse_axis_list(response).vibes);
}

std::vector<Vibe> reduce_axes(gateway::Gateway& gateway, const RunConfig& config,
                              std::span<const Vibe> representatives, std::size_t cap, ReduceAudit* audit) {
  if (representatives.empty()) throw std::invalid_argument("reduce_axes needs at least one axis");
  ReduceAudit local;
  ReduceAudit& a = audit ? *audit : local;
  auto fallback = [&] {
    a.fell_back = true;
    const std::size_t keep = std::min(cap, representatives.size());
    return std::vector<Vibe>(representatives.begin(), representatives.begin() + static_cast<std::ptrdiff_t>(keep));
  };

  std::vector<Vibe> reduced;
  try {
    reduced = reduce_call(gateway, config, prompts::reduction(representatives), a.reduction_response);
  } catch (const ReduceParseError& e) {
    spdlog::warn("{}; keeping the largest clusters' representatives", e.what());
    return fallback();
  }
  if (reduced.size() > cap) {
    a.used_final = true;
    try {
      reduced = reduce_call(gateway, config, prompts::final_reduction(reduced, cap), a.final_response);
    } catch (const ReduceParseError& e) {
      spdlog::warn("{}; keeping the largest clusters' representatives", e.what());
      return fallback();
    }
    if (reduced.size() > cap) reduced.resize(cap);
  }
  return reduced;
}

std::vector<Vibe> dedup_against_existing(gateway::Gateway& gateway, const RunConfig& config,
                                         std::span<const Vibe> fresh, std::span<const Vibe> existing,
                                         bool* fell_back) {
  if (fell_back) *fell_back = false;
  std::unordered_set<std::string> existing_names;
  for (const auto& v : existing) existing_names.insert(axis_name_key(v.name));
  std::vector<Vibe> candidates;
  for (const auto& v : fresh)
    if (!existing_names.count(axis_name_key(v.name))) candidates.push_back(v);
  if (candidates.empty() || existing.empty()) return candidates;

  std::string response;
  try {
    const auto kept = reduce_call(gateway, config, prompts::dedup(existing, candidates), response);
    std::unordered_set<std::string> kept_names;
    for (const auto& v : kept) kept_names.insert(axis_name_key(v.name));
    std::vector<Vibe> out;
    for (auto& v : candidates)
      if (kept_names.count(axis_name_key(v.name))) out.push_back(std::move(v));
    return out;
  } catch (const ReduceParseError& e) {
    spdlog::warn("{}; deduplicating by embedding similarity", e.what());
  }

  if (fell_back) *fell_back = true;
  std::vector<std::string> texts = rendered(existing);
  for (const auto& t : rendered(candidates)) texts.push_back(t);
  const auto vectors = gateway.embed(texts, config.embed_model);
  std::vector<Vibe> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool redundant = false;
    for (std::size_t e = 0; e < existing.size(); ++e)
      if (1.0 - cosine_distance(vectors[existing.size() + i], vectors[e]) > 1.0 - config.cluster_threshold)
        redundant = true;
    if (!redundant) out.push_back(candidates[i]);
  }
  return out;
}

DiscoveryResult discover(gateway::Gateway& gateway, const RunConfig& config, std::span<const ComparisonRecord> sample,
                         std::span<const Vibe> existing) {
  DiscoveryResult result;
  if (sample.empty()) return result;

  const std::size_t batch = std::max<std::size_t>(config.batch, 1);
  const std::size_t count = sample.size() < batch ? 1 : sample.size() / batch;
  std::vector<std::optional<Proposal>> proposals(count);
  parallel_for(count, gateway.concurrency(), [&](std::size_t b) {
    const std::size_t start = b * batch;
    const std::size_t len = std::min(batch, sample.size() - start);
    try {
      proposals[b] = propose_axes(gateway, config, sample.subspan(start, len), existing, b);
    } catch (const ZeroAxesParsed& e) {
      spdlog::warn("{}", e.what());
    }
  });
  for (auto& p : proposals) {
    if (!p) continue;
    for (const auto& v : p->axes) result.pool.push_back(v);
    result.proposals.push_back(std::move(*p));
  }
  if (result.pool.empty()) return result;

  result.clusters = cluster_axes(gateway, config.embed_model, result.pool, config.cluster_threshold);
  for (const auto& c : result.clusters) result.representatives.push_back(result.pool[c.representative]);

  result.reduced = reduce_axes(gateway, config, result.representatives, config.num_eval_vibes, &result.reduce_audit);
  result.vibes = existing.empty()
                     ? result.reduced
                     : dedup_against_existing(gateway, config, result.reduced, existing, &result.dedup_fell_back);
  if (result.vibes.size() > config.num_eval_vibes) result.vibes.resize(config.num_eval_vibes);
  return result;
}

}  // namespace vibecheck::discovery
