#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "vibecheck/gateway/provider.hpp"

namespace vibecheck::gateway {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Blocking HTTP POST. Throws a retryable ProviderError when no response was
/// received (connection refused, timeout, TLS failure).
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body) = 0;
};

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(120)) : timeout_(timeout) {}
  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body) override;

 private:
  std::chrono::seconds timeout_;
};

/// Maps an HTTP status to the error taxonomy: 401/403 are AuthError,
/// 408/409/429 and 5xx are retryable, anything else is permanent.
[[noreturn]] void throw_for_status(std::string_view provider, const HttpResponse& response);

struct EndpointConfig {
  std::string name;          // key prefix, e.g. "openai"
  std::string base_url;      // e.g. "https://api.openai.com/v1"
  std::string api_key_env;   // e.g. "OPENAI_API_KEY"
};

/// Chat-completions and embeddings over the OpenAI wire format (also served
/// by OpenRouter, Together and most self-hosted gateways).
class OpenAICompatibleProvider final : public Provider {
 public:
  OpenAICompatibleProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport);

  std::string_view name() const override { return config_.name; }
  ChatResponse chat(const ChatRequest& request) override;
  std::vector<Embedding> embed(std::span<const std::string> texts, const std::string& model) override;

 private:
  std::string api_key() const;

  EndpointConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

/// Anthropic Messages API. Chat only.
class AnthropicProvider final : public Provider {
 public:
  AnthropicProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport);

  std::string_view name() const override { return config_.name; }
  ChatResponse chat(const ChatRequest& request) override;
  std::vector<Embedding> embed(std::span<const std::string> texts, const std::string& model) override;

 private:
  EndpointConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

EndpointConfig openai_endpoint();
EndpointConfig openrouter_endpoint();
EndpointConfig anthropic_endpoint();

}  // namespace vibecheck::gateway
