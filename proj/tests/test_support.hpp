#pragma once

// Helpers shared by the test binaries: canned backends, temp dirs, and
// fixture-file access.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ioeval/backend.hpp"
#include "ioeval/errors.hpp"

namespace ioeval::testing {

inline std::string data_path(const std::string& name) {
  return std::string(IOEVAL_TEST_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline nlohmann::ordered_json read_json_file(const std::filesystem::path& path) {
  return nlohmann::ordered_json::parse(read_file(path));
}

// Fresh directory under the system temp root; removed when the guard dies.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Backend driven by a callable; the workhorse for pipeline tests.
class FnBackend : public ChatBackend {
 public:
  using Fn = std::function<ChatResult(const std::vector<ChatMessage>&, const ChatParams&)>;

  explicit FnBackend(Fn fn, std::string identity = "scripted")
      : fn_(std::move(fn)), identity_(std::move(identity)) {}

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const ChatParams& params) override {
    return fn_(messages, params);
  }
  std::string identity() const override { return identity_; }

 private:
  Fn fn_;
  std::string identity_;
};

// Counts complete() calls on the wrapped backend.
class CountingBackend : public ChatBackend {
 public:
  explicit CountingBackend(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const ChatParams& params) override {
    calls_.fetch_add(1);
    return inner_->complete(messages, params);
  }
  std::string identity() const override { return inner_->identity(); }

  long calls() const { return calls_.load(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::atomic<long> calls_{0};
};

inline ChatParams test_params(const std::string& model = "test-model") {
  ChatParams params;
  params.model_id = model;
  return params;
}

}  // namespace ioeval::testing
