#include "vibecheck/gateway/cache.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "vibecheck/errors.hpp"

namespace vibecheck::gateway {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

CacheKey CacheKey::for_chat(std::string_view provider, const ChatRequest& r) {
  json canonical = json::array({"chat", provider, r.model, r.system, r.user, r.temperature, r.max_tokens});
  return CacheKey{sha256_hex(canonical.dump())};
}

CacheKey CacheKey::for_embedding(std::string_view provider, std::string_view model, std::string_view text) {
  json canonical = json::array({"embed", provider, model, text});
  return CacheKey{sha256_hex(canonical.dump())};
}

ResponseCache::ResponseCache(std::filesystem::path directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create cache directory " + directory.string() + ": " + ec.message());
  file_ = directory / kFileName;
  load();
}

void ResponseCache::load() {
  std::ifstream in(*file_, std::ios::binary);
  if (!in) return;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      ++skipped_;
      break;
    }
    std::size_t length = 0;
    bool digits = nl > pos;
    for (std::size_t i = pos; i < nl && digits; ++i) {
      if (data[i] < '0' || data[i] > '9') digits = false;
      else length = length * 10 + static_cast<std::size_t>(data[i] - '0');
    }
    if (digits && nl + 1 + length + 1 > data.size()) {
      // A trailing entry cut short by a crash.
      ++skipped_;
      break;
    }
    if (!digits || data[nl + 1 + length] != '\n') {
      // Torn or foreign bytes. Resynchronise on the next newline-delimited header.
      ++skipped_;
      pos = nl + 1;
      continue;
    }
    try {
      json payload = json::parse(data.substr(nl + 1, length));
      CacheEntry entry;
      entry.text = payload.value("text", "");
      if (payload.contains("vector")) entry.vector = payload.at("vector").get<Embedding>();
      entries_.emplace(payload.at("key").get<std::string>(), std::move(entry));
    } catch (const json::exception&) {
      ++skipped_;
    }
    pos = nl + 1 + length + 1;
  }
  if (skipped_ > 0) spdlog::warn("response cache: skipped {} torn entries in {}", skipped_, file_->string());
}

std::optional<CacheEntry> ResponseCache::lookup(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key.hex);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::store(const CacheKey& key, const CacheEntry& entry) {
  std::lock_guard lock(mutex_);
  if (entries_.count(key.hex)) return;
  entries_.emplace(key.hex, entry);
  if (!file_) return;

  json payload = {{"key", key.hex}, {"text", entry.text}};
  if (!entry.vector.empty()) payload["vector"] = entry.vector;
  std::string body = payload.dump();
  std::string record = std::to_string(body.size()) + "\n" + body + "\n";

  int fd = ::open(file_->c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot open cache file " + file_->string() + ": " + std::strerror(errno));
  const char* p = record.data();
  std::size_t left = record.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw IoError("cannot append to cache file " + file_->string() + ": " + std::strerror(err));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::close(fd);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace vibecheck::gateway
