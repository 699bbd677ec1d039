#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ioeval {

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

struct ChatParams {
  std::string model_id;
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

struct ChatResult {
  std::string content;
  // Absent when the source cannot know them (scripted backends, cache hits),
  // so replayed run logs are byte-stable.
  std::optional<long> prompt_tokens;
  std::optional<long> completion_tokens;
  std::optional<double> latency_ms;
};

// One chat completion per call. Implementations must tolerate concurrent
// complete() calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResult complete(const std::vector<ChatMessage>& messages,
                              const ChatParams& params) = 0;
  // Stable string naming the response source; part of every cache key.
  virtual std::string identity() const = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 500;
  int max_backoff_ms = 4000;
};

// OpenAI-compatible endpoint: POST {base_url}/v1/chat/completions.
// Retries connection failures, 5xx, and 429 with capped exponential backoff;
// any other non-200 or an unreadable body fails immediately.
class HttpBackend : public ChatBackend {
 public:
  HttpBackend(std::string base_url, std::string api_key,
              RetryPolicy retry = {});

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const ChatParams& params) override;
  std::string identity() const override { return "http:" + base_url_; }

 private:
  ChatResult attempt(const std::vector<ChatMessage>& messages,
                     const ChatParams& params);

  std::string base_url_;    // normalized: no trailing '/'
  std::string host_part_;   // scheme://host[:port]
  std::string path_prefix_; // leading path under the host, may be empty
  std::string api_key_;     // sent as a Bearer header, never serialized
  RetryPolicy retry_;
};

// Canned responses for tests and offline runs. Two matching modes:
//  - ordinal: a key matches when it is a substring of the conversation's
//    first user message; each match consumes the key's next response.
//  - fingerprint: exact conversation_fingerprint() lookup.
// Any unmatched conversation throws ScriptMiss.
class ScriptedBackend : public ChatBackend {
 public:
  enum class Mode { kOrdinal, kFingerprint };

  explicit ScriptedBackend(Mode mode = Mode::kOrdinal) : mode_(mode) {}

  // File layout: {"mode": "ordinal"|"fingerprint", "entries": {...}} where
  // ordinal entries map key -> response list (a bare string counts as a
  // one-element list) and fingerprint entries map digest -> response.
  static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);

  void add_ordinal(const std::string& key, std::vector<std::string> responses);
  void add_fingerprint(const std::string& fingerprint, std::string response);

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const ChatParams& params) override;
  std::string identity() const override { return "scripted"; }

 private:
  Mode mode_;
  std::mutex mu_;
  std::map<std::string, std::vector<std::string>> ordinal_;
  std::map<std::string, size_t> cursor_;
  std::map<std::string, std::string> fingerprint_;
};

// Digest of (params, messages) — what a conversation asked for, independent
// of which backend answers it.
std::string conversation_fingerprint(const std::vector<ChatMessage>& messages,
                                     const ChatParams& params);

// Content address of one request against one backend.
struct CacheKey {
  std::string digest;

  static CacheKey compute(const std::string& backend_identity,
                          const ChatParams& params,
                          const std::vector<ChatMessage>& messages);
};

// One JSON file per key under dir: {"request": ..., "response": ...}.
// Writes go through a temp file + rename; a corrupt or unreadable file is
// reported to stderr and treated as a miss.
class ResponseCache {
 public:
  explicit ResponseCache(std::string dir);

  std::optional<ChatResult> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const std::string& backend_identity,
             const ChatParams& params,
             const std::vector<ChatMessage>& messages,
             const ChatResult& result);

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::mutex write_mu_;
};

// Serves from the cache when possible, otherwise forwards to the inner
// backend and records the response. Transparent: identity() is the inner
// backend's, so cache keys are the same with and without the wrapper.
class CachingBackend : public ChatBackend {
 public:
  CachingBackend(std::shared_ptr<ChatBackend> inner,
                 std::shared_ptr<ResponseCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const ChatParams& params) override;
  std::string identity() const override { return inner_->identity(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace ioeval
