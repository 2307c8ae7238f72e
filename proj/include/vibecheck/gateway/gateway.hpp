#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "vibecheck/gateway/cache.hpp"
#include "vibecheck/gateway/provider.hpp"
#include "vibecheck/gateway/types.hpp"

namespace vibecheck::gateway {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  /// Each delay is stretched by a uniform factor in [1, 1 + jitter).
  double jitter = 0.25;
};

struct GatewayOptions {
  std::size_t concurrency = 8;
  RetryPolicy retry;
  std::optional<std::filesystem::path> cache_dir;
  /// Replaced in tests to avoid real sleeping.
  std::function<void(std::chrono::milliseconds)> sleep;
  std::size_t embed_batch = 64;
};

struct GatewayStats {
  std::size_t chat_requests = 0;
  std::size_t embed_texts = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  /// Provider invocations, including retried attempts.
  std::size_t provider_calls = 0;
  std::size_t retries = 0;

  double hit_rate() const {
    const std::size_t total = cache_hits + cache_misses;
    return total == 0 ? 0.0 : static_cast<double>(cache_hits) / static_cast<double>(total);
  }
};

/// The single access point to model providers.
///
/// Model identifiers are "<provider>/<model>"; the prefix selects a registered
/// provider and the remainder is forwarded. A catch-all provider, when set,
/// receives every request with the full identifier (used for the offline
/// mock). Safe for concurrent callers.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void register_provider(std::string prefix, std::shared_ptr<Provider> provider);
  void set_catch_all(std::shared_ptr<Provider> provider);

  ChatResponse chat(const ChatRequest& request);
  /// One unit-normalised vector per text, cached per (model, text).
  std::vector<Embedding> embed(std::span<const std::string> texts, const std::string& model);

  GatewayStats stats() const;
  std::size_t concurrency() const noexcept { return options_.concurrency; }
  std::size_t peak_in_flight() const noexcept { return peak_in_flight_.load(); }

 private:
  struct Route {
    Provider* provider;
    std::string provider_name;
    std::string local_model;
  };
  Route resolve(const std::string& model) const;

  template <typename Fn>
  auto with_retries(Fn&& fn) -> decltype(fn());
  std::chrono::milliseconds backoff(int attempt);

  GatewayOptions options_;
  std::map<std::string, std::shared_ptr<Provider>> providers_;
  std::shared_ptr<Provider> catch_all_;
  std::unique_ptr<ResponseCache> cache_;
  std::counting_semaphore<> in_flight_;
  std::atomic<std::size_t> current_in_flight_{0};
  std::atomic<std::size_t> peak_in_flight_{0};

  mutable std::mutex stats_mutex_;
  GatewayStats stats_;
  std::mutex rng_mutex_;
  std::mt19937_64 jitter_rng_{0x5eed};
  std::mutex dims_mutex_;
  std::map<std::string, std::size_t> embed_dims_;
};

/// Registers the built-in HTTP providers (openai, openrouter, anthropic).
void register_default_providers(Gateway& gateway);

}  // namespace vibecheck::gateway
