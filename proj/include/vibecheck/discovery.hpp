#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vibecheck/core.hpp"
#include "vibecheck/gateway/gateway.hpp"

namespace vibecheck::discovery {

/// One proposer line that parsed as an axis.
struct RawAxis {
  std::string text;
  std::size_t source_batch = 0;
};

struct Proposal {
  std::size_t batch = 0;
  std::string response;
  bool repaired = false;
  std::vector<RawAxis> lines;
  std::vector<Vibe> axes;
  std::vector<std::string> rejected;
};

/// One proposer call over a batch of records. Uses the iteration prompt when
/// `existing` is non-empty. Retries once with a format reminder when nothing
/// parses, then throws ZeroAxesParsed.
Proposal propose_axes(gateway::Gateway& gateway, const RunConfig& config, std::span<const ComparisonRecord> batch,
                      std::span<const Vibe> existing, std::size_t batch_index = 0);

struct Cluster {
  std::vector<std::size_t> members;  // ascending indices into the input
  std::size_t representative = 0;    // the medoid
};

/// Average-linkage agglomerative clustering under cosine distance. Two
/// clusters merge while their mean pairwise distance is at most `threshold`;
/// the closest pair merges first, ties going to the lowest indices. Clusters
/// come back largest first, ties by their first member.
std::vector<Cluster> cluster_embeddings(const std::vector<gateway::Embedding>& vectors, double threshold);

/// Embeds the rendered axes and clusters them.
std::vector<Cluster> cluster_axes(gateway::Gateway& gateway, const std::string& embed_model,
                                  std::span<const Vibe> axes, double threshold);

struct ReduceAudit {
  std::string reduction_response;
  std::string final_response;
  bool used_final = false;
  bool fell_back = false;
};

/// Axes parsed from a reducer response: a quoted list literal when present,
/// otherwise one axis per logical line.
std::vector<Vibe> parse_reduced(std::string_view response);

/// Merges redundant representatives with the reducer and, when more than
/// `cap` remain, summarizes them to at most `cap`. If the reducer output
/// cannot be parsed after one repair, the first `cap` representatives are
/// returned unchanged.
std::vector<Vibe> reduce_axes(gateway::Gateway& gateway, const RunConfig& config,
                              std::span<const Vibe> representatives, std::size_t cap,
                              ReduceAudit* audit = nullptr);

/// The axes of `fresh` that the reducer keeps alongside `existing`. Axes whose
/// name matches an existing one are always dropped. If the reducer output
/// cannot be parsed, fresh axes whose embedding has cosine similarity above
/// 1 - cluster_threshold with an existing axis are dropped instead.
std::vector<Vibe> dedup_against_existing(gateway::Gateway& gateway, const RunConfig& config,
                                         std::span<const Vibe> fresh, std::span<const Vibe> existing,
                                         bool* fell_back = nullptr);

struct DiscoveryResult {
  std::vector<Proposal> proposals;
  std::vector<Vibe> pool;
  std::vector<Cluster> clusters;
  std::vector<Vibe> representatives;
  ReduceAudit reduce_audit;
  std::vector<Vibe> reduced;
  bool dedup_fell_back = false;
  /// At most num_eval_vibes axes, none named like an existing one.
  std::vector<Vibe> vibes;
};

/// Proposes on batches of `sample`, pools, clusters, reduces and dedups.
/// With m sampled records the proposer sees floor(m / batch) full batches, or
/// a single batch when m < batch.
DiscoveryResult discover(gateway::Gateway& gateway, const RunConfig& config, std::span<const ComparisonRecord> sample,
                         std::span<const Vibe> existing);

}  // namespace vibecheck::discovery
