#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/gateway/types.hpp"

namespace vibecheck::gateway {

/// A backend that answers chat and embedding requests. Implementations throw
/// ProviderError (retryable or not) or AuthError; the gateway owns retries,
/// caching and the in-flight bound.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual std::string_view name() const = 0;
  /// `request.model` carries the provider-local model name.
  virtual ChatResponse chat(const ChatRequest& request) = 0;
  virtual std::vector<Embedding> embed(std::span<const std::string> texts, const std::string& model) = 0;
};

}  // namespace vibecheck::gateway
