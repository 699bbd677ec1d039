#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioeval/benchmarks.hpp"
#include "ioeval/pipeline.hpp"

namespace ioeval {

// JSON shapes used by run logs, cache files, and the generic dataset format.
// Absent optionals are omitted, so logs from sources that report no timing
// (scripted backends, cache hits) are byte-stable across runs.

nlohmann::ordered_json to_json(const CanonicalAnswer& answer);
CanonicalAnswer canonical_answer_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const Question& question);
Question question_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const ConfidenceLabel& label);
ConfidenceLabel confidence_label_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const StageResult& stage);
StageResult stage_result_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::ordered_json& j);

inline constexpr int kRunLogSchemaVersion = 1;

// "2026-01-31T12:00:00Z"
std::string iso8601_utc_now();

// A run log is JSON-lines: one header object (carrying schema_version plus
// whatever run metadata the caller adds), then one RunRecord per line.
struct RunLog {
  nlohmann::ordered_json header;
  std::vector<RunRecord> records;
};

// Injects schema_version into the header if the caller did not set it.
void write_run_log(std::ostream& out, nlohmann::ordered_json header,
                   const std::vector<RunRecord>& records);

// Throws CorruptLog (with the 1-based line number) on any malformed line,
// a missing or unsupported schema_version, or an empty stream.
RunLog read_run_log(std::istream& in);
RunLog read_run_log_file(const std::string& path);  // IoError if unreadable

}  // namespace ioeval
