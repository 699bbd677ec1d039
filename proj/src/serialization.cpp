#include "ioeval/serialization.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>

#include "ioeval/errors.hpp"
#include "ioeval/strings.hpp"

namespace ioeval {

namespace {

using nlohmann::ordered_json;

std::string require_string(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(std::string("missing or non-string field \"") + key + "\"");
  }
  return j[key].get<std::string>();
}

bool require_bool(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_boolean()) {
    throw Error(std::string("missing or non-boolean field \"") + key + "\"");
  }
  return j[key].get<bool>();
}

const ordered_json* optional_field(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

}  // namespace

nlohmann::ordered_json to_json(const CanonicalAnswer& answer) {
  return {{"kind", to_string(answer.kind)}, {"value", answer.value}};
}

CanonicalAnswer canonical_answer_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("answer must be an object");
  return {answer_kind_from_string(require_string(j, "kind")),
          require_string(j, "value")};
}

nlohmann::ordered_json to_json(const Question& question) {
  ordered_json j = ordered_json::object();
  j["id"] = question.id;
  j["text"] = question.text;
  if (question.gold) j["gold"] = *question.gold;
  j["kind"] = to_string(question.kind);
  j["benchmark"] = question.benchmark;
  if (question.open_beta) j["open_beta"] = *question.open_beta;
  return j;
}

Question question_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("question must be an object");
  Question q;
  q.id = require_string(j, "id");
  q.text = require_string(j, "text");
  if (const auto* gold = optional_field(j, "gold")) {
    if (!gold->is_string()) throw Error("field \"gold\" must be a string");
    q.gold = gold->get<std::string>();
  }
  q.kind = answer_kind_from_string(j.contains("kind")
                                       ? require_string(j, "kind")
                                       : std::string("free_text"));
  q.benchmark =
      j.contains("benchmark") ? require_string(j, "benchmark") : "generic";
  if (const auto* beta = optional_field(j, "open_beta")) {
    if (!beta->is_number_integer()) {
      throw Error("field \"open_beta\" must be an integer");
    }
    q.open_beta = beta->get<int>();
  }
  if (q.kind == AnswerKind::kOpenVerified && !q.open_beta) {
    throw Error("open_verified question \"" + q.id + "\" needs open_beta");
  }
  return q;
}

nlohmann::ordered_json to_json(const ConfidenceLabel& label) {
  ordered_json j = ordered_json::object();
  j["variant"] = to_string(label.variant);
  j["method"] = to_string(label.method);
  if (!label.evidence.empty()) {
    ordered_json evidence = ordered_json::array();
    for (const auto& answer : label.evidence) {
      evidence.push_back(answer ? to_json(*answer) : ordered_json(nullptr));
    }
    j["evidence"] = std::move(evidence);
  }
  return j;
}

ConfidenceLabel confidence_label_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("confidence label must be an object");
  ConfidenceLabel label;
  label.variant = confidence_variant_from_string(require_string(j, "variant"));
  label.method = confidence_method_from_string(require_string(j, "method"));
  if (const auto* evidence = optional_field(j, "evidence")) {
    if (!evidence->is_array()) {
      throw Error("field \"evidence\" must be an array");
    }
    for (const auto& item : *evidence) {
      if (item.is_null()) {
        label.evidence.push_back(std::nullopt);
      } else {
        label.evidence.push_back(canonical_answer_from_json(item));
      }
    }
  }
  return label;
}

nlohmann::ordered_json to_json(const StageResult& stage) {
  ordered_json j = ordered_json::object();
  j["template"] = stage.template_name;
  j["prompt"] = stage.prompt_sent;
  j["response"] = stage.response_text;
  j["executed"] = stage.executed;
  if (stage.raw_answer) j["raw_answer"] = stage.raw_answer->text;
  if (stage.canonical_answer) j["answer"] = to_json(*stage.canonical_answer);
  if (stage.extraction_error) j["extraction_error"] = *stage.extraction_error;
  if (stage.latency_ms) j["latency_ms"] = *stage.latency_ms;
  if (stage.prompt_tokens) j["prompt_tokens"] = *stage.prompt_tokens;
  if (stage.completion_tokens) {
    j["completion_tokens"] = *stage.completion_tokens;
  }
  return j;
}

StageResult stage_result_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("stage result must be an object");
  StageResult stage;
  stage.template_name = require_string(j, "template");
  stage.prompt_sent = require_string(j, "prompt");
  stage.response_text = require_string(j, "response");
  stage.executed = require_bool(j, "executed");
  if (const auto* raw = optional_field(j, "raw_answer")) {
    if (!raw->is_string()) throw Error("field \"raw_answer\" must be a string");
    stage.raw_answer = RawAnswer{raw->get<std::string>()};
  }
  if (const auto* answer = optional_field(j, "answer")) {
    stage.canonical_answer = canonical_answer_from_json(*answer);
  }
  if (const auto* err = optional_field(j, "extraction_error")) {
    if (!err->is_string()) {
      throw Error("field \"extraction_error\" must be a string");
    }
    stage.extraction_error = err->get<std::string>();
  }
  if (const auto* latency = optional_field(j, "latency_ms")) {
    if (!latency->is_number()) {
      throw Error("field \"latency_ms\" must be a number");
    }
    stage.latency_ms = latency->get<double>();
  }
  if (const auto* tokens = optional_field(j, "prompt_tokens")) {
    if (!tokens->is_number_integer()) {
      throw Error("field \"prompt_tokens\" must be an integer");
    }
    stage.prompt_tokens = tokens->get<long>();
  }
  if (const auto* tokens = optional_field(j, "completion_tokens")) {
    if (!tokens->is_number_integer()) {
      throw Error("field \"completion_tokens\" must be an integer");
    }
    stage.completion_tokens = tokens->get<long>();
  }
  return stage;
}

nlohmann::ordered_json to_json(const RunRecord& record) {
  ordered_json j = ordered_json::object();
  j["question_id"] = record.question_id;
  j["pipeline"] = record.pipeline_name;
  j["failed"] = record.failed;
  if (record.failed) j["error"] = record.error;
  j["correct_initial"] = record.correct_initial;
  j["correct_final"] = record.correct_final;
  if (record.final_answer) j["final_answer"] = to_json(*record.final_answer);
  if (record.confidence) j["confidence"] = to_json(*record.confidence);
  ordered_json stages = ordered_json::array();
  for (const auto& stage : record.stages) stages.push_back(to_json(stage));
  j["stages"] = std::move(stages);
  return j;
}

RunRecord run_record_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("run record must be an object");
  RunRecord record;
  record.question_id = require_string(j, "question_id");
  record.pipeline_name = require_string(j, "pipeline");
  record.failed = require_bool(j, "failed");
  if (record.failed) record.error = require_string(j, "error");
  record.correct_initial = require_bool(j, "correct_initial");
  record.correct_final = require_bool(j, "correct_final");
  if (const auto* answer = optional_field(j, "final_answer")) {
    record.final_answer = canonical_answer_from_json(*answer);
  }
  if (const auto* confidence = optional_field(j, "confidence")) {
    record.confidence = confidence_label_from_json(*confidence);
  }
  if (const auto* stages = optional_field(j, "stages")) {
    if (!stages->is_array()) throw Error("field \"stages\" must be an array");
    for (const auto& stage : *stages) {
      record.stages.push_back(stage_result_from_json(stage));
    }
  } else {
    throw Error("missing field \"stages\"");
  }
  return record;
}

std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                utc.tm_min, utc.tm_sec);
  return buf;
}

void write_run_log(std::ostream& out, ordered_json header,
                   const std::vector<RunRecord>& records) {
  if (!header.is_object()) {
    throw IoError("run log header must be a JSON object");
  }
  if (!header.contains("schema_version")) {
    // Keep schema_version first so a human sees it at the top of the file.
    ordered_json with_version = ordered_json::object();
    with_version["schema_version"] = kRunLogSchemaVersion;
    for (auto& [key, value] : header.items()) {
      with_version[key] = std::move(value);
    }
    header = std::move(with_version);
  }
  out << header.dump() << "\n";
  for (const auto& record : records) out << to_json(record).dump() << "\n";
}

RunLog read_run_log(std::istream& in) {
  RunLog log;
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ordered_json doc = ordered_json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw CorruptLog("invalid JSON object", line_no);
    }
    if (!have_header) {
      if (!doc.contains("schema_version") ||
          !doc["schema_version"].is_number_integer()) {
        throw CorruptLog("header missing integer schema_version", line_no);
      }
      int version = doc["schema_version"].get<int>();
      if (version != kRunLogSchemaVersion) {
        throw CorruptLog("unsupported schema_version " +
                             std::to_string(version),
                         line_no);
      }
      log.header = std::move(doc);
      have_header = true;
      continue;
    }
    try {
      log.records.push_back(run_record_from_json(doc));
    } catch (const Error& e) {
      throw CorruptLog(e.what(), line_no);
    }
  }
  if (!have_header) throw CorruptLog("run log has no header line", 1);
  return log;
}

RunLog read_run_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run log: " + path);
  return read_run_log(in);
}

}  // namespace ioeval
