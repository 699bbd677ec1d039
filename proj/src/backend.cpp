#include "ioeval/backend.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ioeval/errors.hpp"
#include "ioeval/hash.hpp"

namespace ioeval {

namespace {

using nlohmann::ordered_json;

// Canonical request document; hashed for cache keys and fingerprints, and
// stored verbatim in cache files. Never carries credentials.
ordered_json request_json(const std::string* backend_identity,
                          const ChatParams& params,
                          const std::vector<ChatMessage>& messages) {
  ordered_json req = ordered_json::object();
  if (backend_identity != nullptr) req["backend"] = *backend_identity;
  req["model"] = params.model_id;
  req["temperature"] = params.temperature;
  if (params.max_tokens) req["max_tokens"] = *params.max_tokens;
  ordered_json msgs = ordered_json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  req["messages"] = std::move(msgs);
  return req;
}

}  // namespace

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(std::string base_url, std::string api_key,
                         RetryPolicy retry)
    : api_key_(std::move(api_key)), retry_(retry) {
  base_url_ = std::move(base_url);
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  // Split scheme://host[:port] from any path prefix under it.
  size_t scheme_end = base_url_.find("://");
  size_t path_start = scheme_end == std::string::npos
                          ? base_url_.find('/')
                          : base_url_.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_part_ = base_url_;
  } else {
    host_part_ = base_url_.substr(0, path_start);
    path_prefix_ = base_url_.substr(path_start);
  }
}

ChatResult HttpBackend::attempt(const std::vector<ChatMessage>& messages,
                                const ChatParams& params) {
  httplib::Client client(host_part_);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(300, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  std::string body = request_json(nullptr, params, messages).dump();
  std::string path = path_prefix_ + "/v1/chat/completions";

  auto start = std::chrono::steady_clock::now();
  httplib::Result res = client.Post(path, headers, body, "application/json");
  auto elapsed = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();

  if (!res) {
    throw NetworkError("POST " + base_url_ + path +
                       " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    throw RateLimited("POST " + path + " returned 429");
  }
  if (res->status >= 500) {
    throw NetworkError("POST " + path + " returned " +
                       std::to_string(res->status));
  }
  if (res->status != 200) {
    throw MalformedResponse("POST " + path + " returned " +
                            std::to_string(res->status) + ": " + res->body);
  }

  ordered_json doc = ordered_json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") ||
      !doc["choices"].is_array() || doc["choices"].empty() ||
      !doc["choices"][0].contains("message") ||
      !doc["choices"][0]["message"].contains("content") ||
      !doc["choices"][0]["message"]["content"].is_string()) {
    throw MalformedResponse("response body is not a chat completion: " +
                            res->body.substr(0, 200));
  }

  ChatResult out;
  out.content = doc["choices"][0]["message"]["content"].get<std::string>();
  out.latency_ms = elapsed;
  if (doc.contains("usage") && doc["usage"].is_object()) {
    const auto& usage = doc["usage"];
    if (usage.contains("prompt_tokens") &&
        usage["prompt_tokens"].is_number()) {
      out.prompt_tokens = usage["prompt_tokens"].get<long>();
    }
    if (usage.contains("completion_tokens") &&
        usage["completion_tokens"].is_number()) {
      out.completion_tokens = usage["completion_tokens"].get<long>();
    }
  }
  return out;
}

ChatResult HttpBackend::complete(const std::vector<ChatMessage>& messages,
                                 const ChatParams& params) {
  int backoff_ms = retry_.initial_backoff_ms;
  for (int tries = 1;; ++tries) {
    try {
      return attempt(messages, params);
    } catch (const MalformedResponse&) {
      throw;  // not transient; retrying would send the same bad request
    } catch (const BackendError&) {
      if (tries >= retry_.max_attempts) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(backoff_ms * 2, retry_.max_backoff_ms);
    }
  }
}

// ---------------------------------------------------------------------------
// ScriptedBackend

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open script file: " + path);
  ordered_json doc = ordered_json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_object()) {
    throw ConfigError("script file is not {\"mode\", \"entries\"}: " + path);
  }
  std::string mode_name = doc.value("mode", std::string("ordinal"));
  Mode mode;
  if (mode_name == "ordinal") {
    mode = Mode::kOrdinal;
  } else if (mode_name == "fingerprint") {
    mode = Mode::kFingerprint;
  } else {
    throw ConfigError("unknown script mode \"" + mode_name + "\" in " + path);
  }

  auto backend = std::make_shared<ScriptedBackend>(mode);
  for (const auto& [key, value] : doc["entries"].items()) {
    if (mode == Mode::kFingerprint) {
      if (!value.is_string()) {
        throw ConfigError("fingerprint entry \"" + key +
                          "\" must be a string response");
      }
      backend->add_fingerprint(key, value.get<std::string>());
    } else if (value.is_string()) {
      backend->add_ordinal(key, {value.get<std::string>()});
    } else if (value.is_array()) {
      std::vector<std::string> responses;
      for (const auto& item : value) {
        if (!item.is_string()) {
          throw ConfigError("ordinal entry \"" + key +
                            "\" must hold string responses");
        }
        responses.push_back(item.get<std::string>());
      }
      backend->add_ordinal(key, std::move(responses));
    } else {
      throw ConfigError("ordinal entry \"" + key +
                        "\" must be a string or string list");
    }
  }
  return backend;
}

void ScriptedBackend::add_ordinal(const std::string& key,
                                  std::vector<std::string> responses) {
  std::lock_guard<std::mutex> lock(mu_);
  ordinal_[key] = std::move(responses);
}

void ScriptedBackend::add_fingerprint(const std::string& fingerprint,
                                      std::string response) {
  std::lock_guard<std::mutex> lock(mu_);
  fingerprint_[fingerprint] = std::move(response);
}

ChatResult ScriptedBackend::complete(const std::vector<ChatMessage>& messages,
                                     const ChatParams& params) {
  std::lock_guard<std::mutex> lock(mu_);

  if (mode_ == Mode::kFingerprint) {
    std::string digest = conversation_fingerprint(messages, params);
    auto it = fingerprint_.find(digest);
    if (it == fingerprint_.end()) {
      throw ScriptMiss("no scripted response for fingerprint " + digest);
    }
    return ChatResult{it->second, std::nullopt, std::nullopt, std::nullopt};
  }

  const std::string* first_user = nullptr;
  for (const auto& m : messages) {
    if (m.role == "user") {
      first_user = &m.content;
      break;
    }
  }
  if (first_user == nullptr) {
    throw ScriptMiss("conversation has no user message to match against");
  }

  std::string matched;
  int matches = 0;
  for (const auto& [key, responses] : ordinal_) {
    if (first_user->find(key) != std::string::npos) {
      matched = key;
      ++matches;
    }
  }
  if (matches == 0) {
    throw ScriptMiss("no script key matches first user message: \"" +
                     first_user->substr(0, 80) + "\"");
  }
  if (matches > 1) {
    throw ScriptMiss("ambiguous script keys (" + std::to_string(matches) +
                     " match) for first user message: \"" +
                     first_user->substr(0, 80) + "\"");
  }

  size_t& cursor = cursor_[matched];
  const auto& responses = ordinal_[matched];
  if (cursor >= responses.size()) {
    throw ScriptMiss("script for key \"" + matched + "\" exhausted after " +
                     std::to_string(responses.size()) + " responses");
  }
  return ChatResult{responses[cursor++], std::nullopt, std::nullopt,
                    std::nullopt};
}

// ---------------------------------------------------------------------------
// Cache

std::string conversation_fingerprint(const std::vector<ChatMessage>& messages,
                                     const ChatParams& params) {
  return sha256_hex(request_json(nullptr, params, messages).dump());
}

CacheKey CacheKey::compute(const std::string& backend_identity,
                           const ChatParams& params,
                           const std::vector<ChatMessage>& messages) {
  return CacheKey{
      sha256_hex(request_json(&backend_identity, params, messages).dump())};
}

ResponseCache::ResponseCache(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache dir " + dir_ + ": " + ec.message());
}

std::optional<ChatResult> ResponseCache::lookup(const CacheKey& key) const {
  std::filesystem::path path = std::filesystem::path(dir_) / (key.digest + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;

  ordered_json doc = ordered_json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("response") ||
      !doc["response"].is_object() || !doc["response"].contains("content") ||
      !doc["response"]["content"].is_string()) {
    std::fprintf(stderr, "warning: ignoring corrupt cache entry %s\n",
                 path.c_str());
    return std::nullopt;
  }

  const auto& resp = doc["response"];
  ChatResult out;
  out.content = resp["content"].get<std::string>();
  if (resp.contains("prompt_tokens") && resp["prompt_tokens"].is_number()) {
    out.prompt_tokens = resp["prompt_tokens"].get<long>();
  }
  if (resp.contains("completion_tokens") &&
      resp["completion_tokens"].is_number()) {
    out.completion_tokens = resp["completion_tokens"].get<long>();
  }
  return out;
}

void ResponseCache::store(const CacheKey& key,
                          const std::string& backend_identity,
                          const ChatParams& params,
                          const std::vector<ChatMessage>& messages,
                          const ChatResult& result) {
  ordered_json doc = ordered_json::object();
  doc["request"] = request_json(&backend_identity, params, messages);
  ordered_json resp = ordered_json::object();
  resp["content"] = result.content;
  if (result.prompt_tokens) resp["prompt_tokens"] = *result.prompt_tokens;
  if (result.completion_tokens) {
    resp["completion_tokens"] = *result.completion_tokens;
  }
  doc["response"] = std::move(resp);

  std::filesystem::path final_path =
      std::filesystem::path(dir_) / (key.digest + ".json");
  std::filesystem::path tmp_path =
      std::filesystem::path(dir_) / (key.digest + ".tmp");

  std::lock_guard<std::mutex> lock(write_mu_);
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    if (!out) throw IoError("cannot write cache file " + tmp_path.string());
    out << doc.dump(2) << "\n";
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) {
    throw IoError("cannot finalize cache file " + final_path.string() + ": " +
                  ec.message());
  }
}

ChatResult CachingBackend::complete(const std::vector<ChatMessage>& messages,
                                    const ChatParams& params) {
  CacheKey key = CacheKey::compute(inner_->identity(), params, messages);
  if (auto hit = cache_->lookup(key)) return *hit;
  ChatResult result = inner_->complete(messages, params);
  cache_->store(key, inner_->identity(), params, messages, result);
  return result;
}

}  // namespace ioeval
