#include "vibecheck/gateway/http_providers.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vibecheck/errors.hpp"

namespace vibecheck::gateway {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ProviderError("malformed URL " + url, false);
  std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string getenv_or_empty(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string();
}

json parse_body(std::string_view provider, const HttpResponse& resp) {
  try {
    return json::parse(resp.body);
  } catch (const json::exception& e) {
    throw ProviderError(std::string(provider) + ": malformed response body: " + e.what(), true, resp.status);
  }
}

}  // namespace

HttpResponse HttplibTransport::post(const std::string& url, const std::map<std::string, std::string>& headers,
                                    const std::string& body) {
  SplitUrl parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto result = client.Post(parts.path, h, body, "application/json");
  if (!result) throw ProviderError("HTTP request to " + parts.origin + " failed: " + httplib::to_string(result.error()), true);
  return HttpResponse{result->status, result->body};
}

void throw_for_status(std::string_view provider, const HttpResponse& response) {
  const int s = response.status;
  std::string what = std::string(provider) + ": HTTP " + std::to_string(s);
  if (!response.body.empty()) what += ": " + response.body.substr(0, 300);
  if (s == 401 || s == 403) throw AuthError(what, s);
  const bool retryable = s == 408 || s == 409 || s == 429 || s >= 500;
  throw ProviderError(what, retryable, s);
}

EndpointConfig openai_endpoint() { return {"openai", "https://api.openai.com/v1", "OPENAI_API_KEY"}; }
EndpointConfig openrouter_endpoint() { return {"openrouter", "https://openrouter.ai/api/v1", "OPENROUTER_API_KEY"}; }
EndpointConfig anthropic_endpoint() { return {"anthropic", "https://api.anthropic.com/v1", "ANTHROPIC_API_KEY"}; }

// --- OpenAI-compatible -------------------------------------------------------

OpenAICompatibleProvider::OpenAICompatibleProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::string OpenAICompatibleProvider::api_key() const {
  std::string key = getenv_or_empty(config_.api_key_env);
  if (key.empty()) throw AuthError(config_.name + ": credentials missing, set " + config_.api_key_env);
  return key;
}

ChatResponse OpenAICompatibleProvider::chat(const ChatRequest& request) {
  const std::string key = api_key();
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  json body = {{"model", request.model},
               {"messages", messages},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens}};

  auto start = std::chrono::steady_clock::now();
  HttpResponse resp = transport_->post(config_.base_url + "/chat/completions",
                                       {{"Authorization", "Bearer " + key}}, body.dump());
  if (resp.status != 200) throw_for_status(config_.name, resp);
  json j = parse_body(config_.name, resp);

  ChatResponse out;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    out.text = content.is_string() ? content.get<std::string>() : std::string();
    if (j.contains("usage")) {
      out.meta.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      out.meta.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw ProviderError(config_.name + ": unexpected chat response shape: " + e.what(), true, resp.status);
  }
  if (out.text.empty()) throw ProviderError(config_.name + ": empty completion", true, resp.status);
  out.meta.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<Embedding> OpenAICompatibleProvider::embed(std::span<const std::string> texts, const std::string& model) {
  const std::string key = api_key();
  json body = {{"model", model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  HttpResponse resp =
      transport_->post(config_.base_url + "/embeddings", {{"Authorization", "Bearer " + key}}, body.dump());
  if (resp.status != 200) throw_for_status(config_.name, resp);
  json j = parse_body(config_.name, resp);

  std::vector<Embedding> out(texts.size());
  try {
    const auto& data = j.at("data");
    if (data.size() != texts.size()) throw ProviderError(config_.name + ": embedding count mismatch", true);
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t index = data[i].value("index", i);
      if (index >= out.size()) throw ProviderError(config_.name + ": embedding index out of range", true);
      out[index] = data[i].at("embedding").get<Embedding>();
    }
  } catch (const json::exception& e) {
    throw ProviderError(config_.name + ": unexpected embedding response shape: " + e.what(), true, resp.status);
  }
  return out;
}

// --- Anthropic ---------------------------------------------------------------

AnthropicProvider::AnthropicProvider(EndpointConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

ChatResponse AnthropicProvider::chat(const ChatRequest& request) {
  std::string key = getenv_or_empty(config_.api_key_env);
  if (key.empty()) throw AuthError(config_.name + ": credentials missing, set " + config_.api_key_env);

  json body = {{"model", request.model},
               {"max_tokens", request.max_tokens},
               {"temperature", request.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", request.user}}})}};
  if (!request.system.empty()) body["system"] = request.system;

  auto start = std::chrono::steady_clock::now();
  HttpResponse resp = transport_->post(config_.base_url + "/messages",
                                       {{"x-api-key", key}, {"anthropic-version", "2023-06-01"}}, body.dump());
  if (resp.status != 200) throw_for_status(config_.name, resp);
  json j = parse_body(config_.name, resp);

  ChatResponse out;
  try {
    for (const auto& block : j.at("content"))
      if (block.value("type", "") == "text") out.text += block.at("text").get<std::string>();
    if (j.contains("usage")) {
      out.meta.prompt_tokens = j["usage"].value("input_tokens", 0);
      out.meta.completion_tokens = j["usage"].value("output_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw ProviderError(config_.name + ": unexpected message response shape: " + e.what(), true, resp.status);
  }
  if (out.text.empty()) throw ProviderError(config_.name + ": empty completion", true, resp.status);
  out.meta.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<Embedding> AnthropicProvider::embed(std::span<const std::string>, const std::string&) {
  throw ProviderError(config_.name + ": embeddings are not offered by this provider", false);
}

}  // namespace vibecheck::gateway
