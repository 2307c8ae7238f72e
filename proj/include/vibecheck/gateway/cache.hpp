#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "vibecheck/gateway/types.hpp"

namespace vibecheck::gateway {

struct CacheEntry {
  std::string text;
  Embedding vector;
};

/// Append-only response store.
///
/// On disk every entry is "<decimal byte count>\n<json payload>\n". Entries
/// are written with a single O_APPEND write, so concurrent writers interleave
/// whole entries; a torn trailing entry left by a crash is skipped on load.
/// Without a directory the cache lives in memory only.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path directory);

  std::optional<CacheEntry> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const CacheEntry& entry);

  std::size_t size() const;
  /// Entries skipped while loading because they were torn or malformed.
  std::size_t skipped_on_load() const noexcept { return skipped_; }
  const std::optional<std::filesystem::path>& file() const noexcept { return file_; }

  static constexpr const char* kFileName = "responses.log";

 private:
  void load();

  std::optional<std::filesystem::path> file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CacheEntry> entries_;
  std::size_t skipped_ = 0;
};

}  // namespace vibecheck::gateway
