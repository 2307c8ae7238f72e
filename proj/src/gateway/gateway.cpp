#include "vibecheck/gateway/gateway.hpp"

#include <cmath>
#include <thread>
#include <unordered_map>

#include "vibecheck/errors.hpp"
#include "vibecheck/gateway/http_providers.hpp"

namespace vibecheck::gateway {

namespace {

class SlotGuard {
 public:
  SlotGuard(std::counting_semaphore<>& sem, std::atomic<std::size_t>& current, std::atomic<std::size_t>& peak)
      : sem_(sem), current_(current) {
    sem_.acquire();
    std::size_t now = current_.fetch_add(1) + 1;
    std::size_t prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
  }
  ~SlotGuard() {
    current_.fetch_sub(1);
    sem_.release();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
  std::atomic<std::size_t>& current_;
};

void normalise(Embedding& v, std::string_view model) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw ProviderError("embedding from " + std::string(model) + " has zero or non-finite norm", false);
  for (double& x : v) x /= norm;
}

}  // namespace

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)),
      cache_(options_.cache_dir ? std::make_unique<ResponseCache>(*options_.cache_dir)
                                 : std::make_unique<ResponseCache>()),
      in_flight_(static_cast<std::ptrdiff_t>(options_.concurrency == 0 ? 1 : options_.concurrency)) {
  if (options_.concurrency == 0) options_.concurrency = 1;
  if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (options_.embed_batch == 0) options_.embed_batch = 64;
}

void Gateway::register_provider(std::string prefix, std::shared_ptr<Provider> provider) {
  providers_[std::move(prefix)] = std::move(provider);
}

void Gateway::set_catch_all(std::shared_ptr<Provider> provider) { catch_all_ = std::move(provider); }

Gateway::Route Gateway::resolve(const std::string& model) const {
  if (catch_all_) return {catch_all_.get(), std::string(catch_all_->name()), model};
  std::size_t slash = model.find('/');
  if (slash != std::string::npos) {
    auto it = providers_.find(model.substr(0, slash));
    if (it != providers_.end()) return {it->second.get(), it->first, model.substr(slash + 1)};
  }
  throw ConfigError("no provider configured for model \"" + model + "\"");
}

std::chrono::milliseconds Gateway::backoff(int attempt) {
  double u = 0.0;
  {
    std::lock_guard lock(rng_mutex_);
    u = std::uniform_real_distribution<double>(0.0, 1.0)(jitter_rng_);
  }
  const auto& p = options_.retry;
  double ms = static_cast<double>(p.base_delay.count()) * std::pow(p.factor, attempt) * (1.0 + p.jitter * u);
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

template <typename Fn>
auto Gateway::with_retries(Fn&& fn) -> decltype(fn()) {
  for (int attempt = 0;; ++attempt) {
    try {
      SlotGuard slot(in_flight_, current_in_flight_, peak_in_flight_);
      {
        std::lock_guard lock(stats_mutex_);
        ++stats_.provider_calls;
      }
      return fn();
    } catch (const AuthError&) {
      throw;
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= options_.retry.max_retries) throw;
      std::lock_guard lock(stats_mutex_);
      ++stats_.retries;
    }
    options_.sleep(backoff(attempt));
  }
}

ChatResponse Gateway::chat(const ChatRequest& request) {
  Route route = resolve(request.model);
  const CacheKey key = CacheKey::for_chat(route.provider_name, request);
  {
    std::lock_guard lock(stats_mutex_);
    ++stats_.chat_requests;
  }
  if (auto hit = cache_->lookup(key)) {
    std::lock_guard lock(stats_mutex_);
    ++stats_.cache_hits;
    ChatResponse out;
    out.text = std::move(hit->text);
    out.from_cache = true;
    return out;
  }
  {
    std::lock_guard lock(stats_mutex_);
    ++stats_.cache_misses;
  }
  ChatRequest local = request;
  local.model = route.local_model;
  ChatResponse response = with_retries([&] { return route.provider->chat(local); });
  if (response.text.empty()) throw ProviderError(request.model + ": empty completion", false);
  cache_->store(key, CacheEntry{response.text, {}});
  return response;
}

std::vector<Embedding> Gateway::embed(std::span<const std::string> texts, const std::string& model) {
  if (texts.empty()) throw std::invalid_argument("embed needs at least one text");
  Route route = resolve(model);

  std::vector<Embedding> out(texts.size());
  std::vector<CacheKey> keys;
  keys.reserve(texts.size());
  // Distinct uncached texts, each mapped to the output slots it fills.
  std::vector<std::string> pending;
  std::unordered_map<std::string, std::vector<std::size_t>> slots;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys.push_back(CacheKey::for_embedding(route.provider_name, model, texts[i]));
    if (auto hit = cache_->lookup(keys.back())) {
      out[i] = std::move(hit->vector);
      ++hits;
      continue;
    }
    auto [it, fresh] = slots.try_emplace(texts[i]);
    if (fresh) pending.push_back(texts[i]);
    it->second.push_back(i);
  }
  {
    std::lock_guard lock(stats_mutex_);
    stats_.embed_texts += texts.size();
    stats_.cache_hits += hits;
    stats_.cache_misses += texts.size() - hits;
  }

  for (std::size_t start = 0; start < pending.size(); start += options_.embed_batch) {
    std::size_t count = std::min(options_.embed_batch, pending.size() - start);
    std::span<const std::string> chunk(pending.data() + start, count);
    std::vector<Embedding> vectors = with_retries([&] { return route.provider->embed(chunk, route.local_model); });
    if (vectors.size() != count) throw ProviderError(model + ": embedding count mismatch", false);
    for (std::size_t k = 0; k < count; ++k) {
      Embedding& v = vectors[k];
      normalise(v, model);
      {
        std::lock_guard lock(dims_mutex_);
        auto [it, fresh] = embed_dims_.try_emplace(model, v.size());
        if (!fresh && it->second != v.size())
          throw ProviderError(model + ": embedding dimension changed from " + std::to_string(it->second) + " to " +
                                  std::to_string(v.size()),
                              false);
      }
      const auto& targets = slots.at(chunk[k]);
      cache_->store(keys[targets.front()], CacheEntry{{}, v});
      for (std::size_t slot : targets) out[slot] = v;
    }
  }
  return out;
}

GatewayStats Gateway::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

void register_default_providers(Gateway& gateway) {
  auto transport = std::make_shared<HttplibTransport>();
  gateway.register_provider("openai", std::make_shared<OpenAICompatibleProvider>(openai_endpoint(), transport));
  gateway.register_provider("openrouter",
                            std::make_shared<OpenAICompatibleProvider>(openrouter_endpoint(), transport));
  gateway.register_provider("anthropic", std::make_shared<AnthropicProvider>(anthropic_endpoint(), transport));
}

}  // namespace vibecheck::gateway
