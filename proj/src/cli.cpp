#include "ioeval/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ioeval/analysis.hpp"
#include "ioeval/benchmarks.hpp"
#include "ioeval/errors.hpp"
#include "ioeval/pipeline.hpp"
#include "ioeval/promptlib.hpp"
#include "ioeval/serialization.hpp"

namespace ioeval {

namespace {

using nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& j,
                         const std::set<std::string>& allowed,
                         const char* scope) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError(std::string("unknown config key \"") + key +
                        "\" in " + scope);
    }
  }
}

std::string config_string(const ordered_json& j, const char* key,
                          std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    throw ConfigError(std::string("config key \"") + key +
                      "\" must be a string");
  }
  return j[key].get<std::string>();
}

bool pipeline_exists(const std::string& name) {
  if (name == "gated_critical") return true;
  for (const auto& variant : pipeline_variants()) {
    if (variant == name) return true;
  }
  return false;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("failed while writing " + path.string());
}

std::string report_extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown: return "md";
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kJson: return "json";
  }
  return "txt";
}

void deliver(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(body.c_str(), stdout);
  } else {
    write_file(out_path, body);
  }
}

// ---------------------------------------------------------------------------
// Commands

int cmd_run(const RunConfig& config) {
  validate_config(config);

  std::vector<Question> questions = load_benchmark(
      config.dataset.path, dataset_format_from_string(config.dataset.format));
  if (config.dataset.subset == "gsm8k_100") {
    questions = select_gsm8k_100(questions);
  }

  std::shared_ptr<ChatBackend> backend = make_backend(config);
  ChatParams params;
  params.model_id = config.backend.model_id;
  params.temperature = config.temperature;
  params.max_tokens = config.max_tokens;

  std::function<RunRecord(const Question&)> runner;
  if (config.pipeline == "gated_critical") {
    ConsistencyConfig consistency{config.consistency_n};
    runner = [backend, params, consistency](const Question& q) {
      return run_gated_critical(q, *backend, params, consistency);
    };
  } else {
    PipelineSpec spec = build_pipeline(config.pipeline);
    runner = [backend, params, spec](const Question& q) {
      return run_pipeline(q, spec, *backend, params);
    };
  }

  std::vector<RunRecord> records =
      run_benchmark(questions, runner, config.parallelism);

  std::filesystem::path out_dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output dir " + out_dir.string() + ": " +
                  ec.message());
  }

  ordered_json header = ordered_json::object();
  header["schema_version"] = kRunLogSchemaVersion;
  header["timestamp"] = iso8601_utc_now();
  header["prompt_catalog_hash"] = PromptCatalog::instance().hash();
  header["config"] = to_json(config);

  std::filesystem::path log_path = out_dir / "run_log.jsonl";
  {
    std::ofstream out(log_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + log_path.string());
    write_run_log(out, header, records);
  }

  // Reports are rendered from the log just written — the same path the
  // report command takes — so regenerating later reproduces them exactly.
  RunLog log = read_run_log_file(log_path.string());
  EvalSummary summary = summarize(log.records, log.header);
  for (ReportFormat format :
       {ReportFormat::kMarkdown, ReportFormat::kCsv, ReportFormat::kJson}) {
    write_file(out_dir / ("report." + report_extension(format)),
               emit_report(summary, format));
  }

  long failed = summary.n_failed;
  std::printf("wrote %s (%ld records, %ld failed)\n", log_path.c_str(),
              summary.n_records, failed);
  return failed > 0 ? 4 : 0;
}

int cmd_report(const std::string& log_path, ReportFormat format,
               const std::string& out_path) {
  RunLog log = read_run_log_file(log_path);
  EvalSummary summary = summarize(log.records, log.header);
  deliver(emit_report(summary, format), out_path);
  return 0;
}

int cmd_compare(const std::string& our_path, const std::string& baseline_path,
                ReportFormat format, const std::string& out_path) {
  RunLog ours = read_run_log_file(our_path);
  RunLog baseline = read_run_log_file(baseline_path);

  std::set<std::string> our_ids, baseline_ids;
  for (const auto& r : ours.records) our_ids.insert(r.question_id);
  for (const auto& r : baseline.records) baseline_ids.insert(r.question_id);
  if (our_ids != baseline_ids) {
    std::string divergent;
    int listed = 0;
    for (const auto& id : our_ids) {
      if (baseline_ids.find(id) == baseline_ids.end() && listed < 10) {
        divergent += " " + id + " (ours only)";
        ++listed;
      }
    }
    for (const auto& id : baseline_ids) {
      if (our_ids.find(id) == our_ids.end() && listed < 10) {
        divergent += " " + id + " (baseline only)";
        ++listed;
      }
    }
    throw DatasetMismatch("runs cover different questions:" + divergent);
  }

  ComparisonInputs inputs;
  inputs.n_questions = static_cast<long>(ours.records.size());
  inputs.p1 = accuracy(ours.records, AnswerStage::kInitial);
  inputs.p3 = accuracy(ours.records, AnswerStage::kFinal);
  inputs.p1_hat = accuracy(baseline.records, AnswerStage::kInitial);
  inputs.p3_hat = accuracy(baseline.records, AnswerStage::kFinal);

  deliver(render_comparison(inputs, format), out_path);
  return 0;
}

int cmd_gen_open(int count, std::uint64_t seed, const std::string& out_path) {
  OpenTaskSpec spec;
  spec.count = count;
  spec.seed = seed;
  std::vector<Question> questions = generate_open_tasks(spec);

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  for (const auto& q : questions) out << to_json(q).dump() << "\n";
  if (!out) throw IoError("failed while writing " + out_path);
  std::printf("wrote %s (%zu questions)\n", out_path.c_str(),
              questions.size());
  return 0;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const CorruptLog*>(&e) != nullptr) return 5;
  if (dynamic_cast<const BackendError*>(&e) != nullptr) return 4;
  if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
      dynamic_cast<const UnknownVariant*>(&e) != nullptr ||
      dynamic_cast<const MissingBinding*>(&e) != nullptr) {
    return 2;
  }
  if (dynamic_cast<const ParseError*>(&e) != nullptr ||
      dynamic_cast<const EmptyDataset*>(&e) != nullptr ||
      dynamic_cast<const IndexOutOfRange*>(&e) != nullptr ||
      dynamic_cast<const DatasetMismatch*>(&e) != nullptr ||
      dynamic_cast<const EmptyInput*>(&e) != nullptr ||
      dynamic_cast<const IoError*>(&e) != nullptr) {
    return 3;
  }
  return 1;
}

}  // namespace

RunConfig run_config_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"backend", "dataset", "pipeline", "consistency_n",
                       "temperature", "max_tokens", "parallelism",
                       "output_dir", "seed"},
                      "config");

  RunConfig config;
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    if (!b.is_object()) throw ConfigError("\"backend\" must be an object");
    reject_unknown_keys(b,
                        {"kind", "base_url", "model_id", "api_key_env_var",
                         "script_path", "cache_dir"},
                        "backend");
    config.backend.kind = config_string(b, "kind", config.backend.kind);
    config.backend.base_url =
        config_string(b, "base_url", config.backend.base_url);
    config.backend.model_id =
        config_string(b, "model_id", config.backend.model_id);
    config.backend.api_key_env_var =
        config_string(b, "api_key_env_var", config.backend.api_key_env_var);
    config.backend.script_path =
        config_string(b, "script_path", config.backend.script_path);
    config.backend.cache_dir =
        config_string(b, "cache_dir", config.backend.cache_dir);
  }
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    if (!d.is_object()) throw ConfigError("\"dataset\" must be an object");
    reject_unknown_keys(d, {"path", "format", "subset"}, "dataset");
    config.dataset.path = config_string(d, "path", config.dataset.path);
    config.dataset.format = config_string(d, "format", config.dataset.format);
    config.dataset.subset = config_string(d, "subset", config.dataset.subset);
  }
  config.pipeline = config_string(j, "pipeline", config.pipeline);
  if (j.contains("consistency_n")) {
    if (!j["consistency_n"].is_number_integer()) {
      throw ConfigError("\"consistency_n\" must be an integer");
    }
    config.consistency_n = j["consistency_n"].get<int>();
  }
  if (j.contains("temperature")) {
    if (!j["temperature"].is_number()) {
      throw ConfigError("\"temperature\" must be a number");
    }
    config.temperature = j["temperature"].get<double>();
  }
  if (j.contains("max_tokens")) {
    if (!j["max_tokens"].is_number_integer()) {
      throw ConfigError("\"max_tokens\" must be an integer");
    }
    config.max_tokens = j["max_tokens"].get<int>();
  }
  if (j.contains("parallelism")) {
    if (!j["parallelism"].is_number_integer()) {
      throw ConfigError("\"parallelism\" must be an integer");
    }
    config.parallelism = j["parallelism"].get<int>();
  }
  config.output_dir = config_string(j, "output_dir", config.output_dir);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError("\"seed\" must be a non-negative integer");
    }
    config.seed = j["seed"].get<std::uint64_t>();
  }
  return config;
}

RunConfig run_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ordered_json doc = ordered_json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ConfigError("config file is not valid JSON: " + path);
  }
  return run_config_from_json(doc);
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  ordered_json j = ordered_json::object();
  j["backend"] = {{"kind", config.backend.kind},
                  {"base_url", config.backend.base_url},
                  {"model_id", config.backend.model_id},
                  {"api_key_env_var", config.backend.api_key_env_var},
                  {"script_path", config.backend.script_path},
                  {"cache_dir", config.backend.cache_dir}};
  j["dataset"] = {{"path", config.dataset.path},
                  {"format", config.dataset.format},
                  {"subset", config.dataset.subset}};
  j["pipeline"] = config.pipeline;
  j["consistency_n"] = config.consistency_n;
  j["temperature"] = config.temperature;
  if (config.max_tokens) j["max_tokens"] = *config.max_tokens;
  j["parallelism"] = config.parallelism;
  j["output_dir"] = config.output_dir;
  j["seed"] = config.seed;
  return j;
}

void validate_config(const RunConfig& config) {
  const BackendConfig& b = config.backend;
  if (b.kind == "live") {
    if (b.base_url.empty()) {
      throw ConfigError("live backend requires backend.base_url");
    }
    if (b.model_id.empty()) {
      throw ConfigError("live backend requires backend.model_id");
    }
    const char* key = std::getenv(b.api_key_env_var.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("live backend requires the API key env var " +
                        b.api_key_env_var + " to be set and non-empty");
    }
  } else if (b.kind == "scripted") {
    if (b.script_path.empty()) {
      throw ConfigError("scripted backend requires backend.script_path");
    }
  } else if (b.kind == "replay") {
    if (b.base_url.empty() || b.model_id.empty()) {
      throw ConfigError(
          "replay backend requires backend.base_url and backend.model_id "
          "(they are part of every cache key)");
    }
    if (b.cache_dir.empty()) {
      throw ConfigError("replay backend requires backend.cache_dir");
    }
  } else {
    throw ConfigError("backend.kind must be live, scripted, or replay; got \"" +
                      b.kind + "\"");
  }

  if (!pipeline_exists(config.pipeline)) {
    throw ConfigError("unknown pipeline \"" + config.pipeline + "\"");
  }
  dataset_format_from_string(config.dataset.format);  // throws on bad value
  if (config.dataset.subset != "all" && config.dataset.subset != "gsm8k_100") {
    throw ConfigError("dataset.subset must be all or gsm8k_100; got \"" +
                      config.dataset.subset + "\"");
  }
  if (config.dataset.path.empty()) {
    throw ConfigError("dataset.path is required");
  }
  if (config.consistency_n < 2) {
    throw ConfigError("consistency_n must be >= 2");
  }
  if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (config.temperature < 0.0) throw ConfigError("temperature must be >= 0");
  if (config.output_dir.empty()) throw ConfigError("output_dir is required");
}

std::shared_ptr<ChatBackend> make_backend(const RunConfig& config) {
  const BackendConfig& b = config.backend;
  std::shared_ptr<ChatBackend> inner;
  if (b.kind == "scripted") {
    inner = ScriptedBackend::from_file(b.script_path);
  } else {
    // live and replay both talk to the endpoint on a cache miss; replay just
    // tolerates a missing API key since it expects to stay inside the cache.
    const char* key = std::getenv(b.api_key_env_var.c_str());
    inner = std::make_shared<HttpBackend>(b.base_url,
                                          key == nullptr ? "" : key);
  }
  if (!b.cache_dir.empty()) {
    auto cache = std::make_shared<ResponseCache>(b.cache_dir);
    return std::make_shared<CachingBackend>(std::move(inner),
                                            std::move(cache));
  }
  return inner;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Benchmark harness for confidence-guided self-correction of "
               "chat models"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand(
      "run", "Evaluate a pipeline over a dataset and write a run log");
  std::string run_config_path, run_dataset, run_format, run_subset;
  std::string run_pipeline, run_backend, run_out;
  int run_parallelism = 0;
  int run_n = 0;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  run->add_option("--config", run_config_path, "JSON config file");
  run->add_option("--dataset", run_dataset, "dataset file path");
  run->add_option("--format", run_format,
                  "dataset format (gsm8k|svamp|hotpotqa|sports|llc|generic)");
  run->add_option("--subset", run_subset, "question subset (all|gsm8k_100)");
  run->add_option("--pipeline", run_pipeline,
                  "pipeline variant or gated_critical");
  run->add_option("--backend", run_backend,
                  "backend kind[:detail]; detail is script_path for "
                  "scripted, base_url for live/replay");
  run->add_option("--parallelism", run_parallelism, "concurrent questions");
  run->add_option("--n", run_n, "consistency-checking sample count");
  auto* seed_opt =
      run->add_option("--seed", run_seed, "seed recorded with the run");
  run->add_option("--out", run_out, "output directory");

  // --- report ---
  auto* report = app.add_subcommand(
      "report", "Recompute the report from an existing run log");
  std::string report_log, report_format = "markdown", report_out;
  report->add_option("log", report_log, "run log path")->required();
  report->add_option("--format", report_format, "markdown|csv|json");
  report->add_option("--out", report_out, "output file (default stdout)");

  // --- compare ---
  auto* compare = app.add_subcommand(
      "compare", "Compare a run against a baseline run with normalization");
  std::string compare_ours, compare_baseline;
  std::string compare_format = "markdown", compare_out;
  compare->add_option("ours", compare_ours, "our run log")->required();
  compare->add_option("baseline", compare_baseline, "baseline run log")
      ->required();
  compare->add_option("--format", compare_format, "markdown|csv|json");
  compare->add_option("--out", compare_out, "output file (default stdout)");

  // --- gen-open ---
  auto* gen = app.add_subcommand(
      "gen-open", "Generate the open-task dataset (verifiable year questions)");
  int gen_count = 100;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "open_tasks.jsonl";
  gen->add_option("--n", gen_count, "question count");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output dataset path");

  std::vector<const char*> argv;
  argv.push_back("ioeval");
  for (const auto& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    run_seed_set = seed_opt->count() > 0;

    if (run->parsed()) {
      RunConfig config;
      if (!run_config_path.empty()) {
        config = run_config_from_file(run_config_path);
      }
      if (!run_dataset.empty()) config.dataset.path = run_dataset;
      if (!run_format.empty()) config.dataset.format = run_format;
      if (!run_subset.empty()) config.dataset.subset = run_subset;
      if (!run_pipeline.empty()) config.pipeline = run_pipeline;
      if (!run_backend.empty()) {
        size_t colon = run_backend.find(':');
        std::string kind = run_backend.substr(0, colon);
        config.backend.kind = kind;
        if (colon != std::string::npos) {
          std::string detail = run_backend.substr(colon + 1);
          if (kind == "scripted") {
            config.backend.script_path = detail;
          } else {
            config.backend.base_url = detail;
          }
        }
      }
      if (run_parallelism > 0) config.parallelism = run_parallelism;
      if (run_n > 0) config.consistency_n = run_n;
      if (run_seed_set) config.seed = run_seed;
      if (!run_out.empty()) config.output_dir = run_out;
      return cmd_run(config);
    }
    if (report->parsed()) {
      return cmd_report(report_log, report_format_from_string(report_format),
                        report_out);
    }
    if (compare->parsed()) {
      return cmd_compare(compare_ours, compare_baseline,
                         report_format_from_string(compare_format),
                         compare_out);
    }
    if (gen->parsed()) {
      if (gen_count < 1) throw ConfigError("--n must be >= 1");
      return cmd_gen_open(gen_count, gen_seed, gen_out);
    }
    throw ConfigError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // CLI11 returns 0 for --help/--version; anything else is a usage error.
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace ioeval
