#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vibecheck::gateway {

struct ChatRequest {
  /// Provider-qualified identifier, e.g. "openai/gpt-4o" or "mock/judge-1".
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_tokens = 1024;
};

struct ProviderMeta {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency_ms = 0.0;
};

struct ChatResponse {
  std::string text;
  ProviderMeta meta;
  bool from_cache = false;
};

using Embedding = std::vector<double>;

/// Hex SHA-256 digest identifying a request. Equal requests give equal keys;
/// changing any field changes the key.
struct CacheKey {
  std::string hex;

  static CacheKey for_chat(std::string_view provider, const ChatRequest& request);
  static CacheKey for_embedding(std::string_view provider, std::string_view model, std::string_view text);

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// Hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace vibecheck::gateway
