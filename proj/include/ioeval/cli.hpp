#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioeval/backend.hpp"

namespace ioeval {

struct BackendConfig {
  std::string kind = "live";  // live | scripted | replay
  std::string base_url;
  std::string model_id = "default";
  // Name of the environment variable holding the API key. Only the name is
  // ever serialized; the key value stays in the process environment.
  std::string api_key_env_var = "OPENAI_API_KEY";
  std::string script_path;
  std::string cache_dir;
};

struct DatasetConfig {
  std::string path;
  std::string format = "generic";
  std::string subset = "all";  // all | gsm8k_100
};

struct RunConfig {
  BackendConfig backend;
  DatasetConfig dataset;
  std::string pipeline = "ioe_with_decision";
  int consistency_n = 10;
  double temperature = 0.0;
  std::optional<int> max_tokens;
  int parallelism = 1;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

// Rejects unknown keys at every level so typos fail loudly.
RunConfig run_config_from_json(const nlohmann::ordered_json& j);
RunConfig run_config_from_file(const std::string& path);

// Snapshot embedded in run-log headers; feeding it back through
// run_config_from_json reproduces the config.
nlohmann::ordered_json to_json(const RunConfig& config);

// Structural checks plus backend-kind requirements (live needs base_url,
// model_id, and the API key env var set; scripted needs script_path; replay
// needs base_url, model_id, and cache_dir). Throws ConfigError.
void validate_config(const RunConfig& config);

// Constructs the configured backend; any cache_dir wraps it in a replay
// cache. validate_config must have passed.
std::shared_ptr<ChatBackend> make_backend(const RunConfig& config);

// Entry point used by the binary: args exclude the program name.
// Exit codes: 0 ok; 1 unexpected; 2 config; 3 dataset/input; 4 backend
// (including any failed record in a run); 5 corrupt run log.
int run_cli(const std::vector<std::string>& args);

}  // namespace ioeval
