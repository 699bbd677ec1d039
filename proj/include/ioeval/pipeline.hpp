#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ioeval/backend.hpp"
#include "ioeval/benchmarks.hpp"
#include "ioeval/extraction.hpp"
#include "ioeval/promptlib.hpp"

namespace ioeval {

struct StageResult {
  std::string template_name;
  // Empty when the stage was skipped by its condition; kept when the stage
  // was attempted but the backend failed.
  std::string prompt_sent;
  std::string response_text;  // empty unless executed
  bool executed = false;
  std::optional<RawAnswer> raw_answer;
  std::optional<CanonicalAnswer> canonical_answer;
  // Why extraction or canonicalization failed; answers above stay absent.
  std::optional<std::string> extraction_error;
  std::optional<double> latency_ms;
  std::optional<long> prompt_tokens;
  std::optional<long> completion_tokens;
};

struct ConfidenceLabel {
  enum class Variant { kConfident, kUnconfident };
  enum class Method { kSelfAssessment, kConsistencyChecking };

  Variant variant = Variant::kUnconfident;
  Method method = Method::kSelfAssessment;
  // The n consistency-run answers (null where extraction failed).
  // Empty exactly when method == kSelfAssessment: a self-assessment label is
  // derived from stage answers the record already carries.
  std::vector<std::optional<CanonicalAnswer>> evidence;
};

std::string to_string(ConfidenceLabel::Variant v);
std::string to_string(ConfidenceLabel::Method m);
ConfidenceLabel::Variant confidence_variant_from_string(const std::string& s);
ConfidenceLabel::Method confidence_method_from_string(const std::string& s);

struct RunRecord {
  std::string question_id;
  std::string pipeline_name;
  std::vector<StageResult> stages;
  // Canonical answer of the last executed stage that produced one.
  std::optional<CanonicalAnswer> final_answer;
  std::optional<ConfidenceLabel> confidence;
  bool correct_initial = false;
  bool correct_final = false;
  bool failed = false;
  std::string error;  // set iff failed
};

// Executes the stages in order on one growing conversation. A stage with an
// IfMismatch condition runs iff the referenced stages' answers are not both
// present and equal. Extraction failures are recorded per stage and are not
// fatal; a BackendError marks the record failed and stops the conversation.
// Self-assessment pipelines (stage 2 is an answer-bearing IOE template) get
// their confidence label attached automatically.
RunRecord run_pipeline(const Question& question, const PipelineSpec& spec,
                       ChatBackend& backend, const ChatParams& params);

// Confident iff stage 1 and stage 2 both produced answers and they match.
// Evidence stays empty; the record's stages are the evidence.
// Throws InsufficientStages when the record has fewer than two stages.
ConfidenceLabel assess_confidence_self(const RunRecord& record);

struct ConsistencyConfig {
  int n = 10;  // >= 2
};

// Runs the standard prompt n times in fresh conversations. Confident iff all
// n answers are present and pairwise equal; evidence carries all n answers.
// Throws ConfigError when cfg.n < 2; propagates BackendError.
ConfidenceLabel assess_confidence_consistency(const Question& question,
                                              ChatBackend& backend,
                                              const ChatParams& params,
                                              const ConsistencyConfig& cfg = {});

// Consistency-gated correction: Confident questions get one fresh
// standard-prompt answer (n+1 calls total) and are never asked to revise;
// Unconfident questions run the one-stage critical pipeline. The consistency
// label is attached to the returned record (pipeline_name "gated_critical").
RunRecord run_gated_critical(const Question& question, ChatBackend& backend,
                             const ChatParams& params,
                             const ConsistencyConfig& cfg = {});

// Evaluates every question, preserving input order in the output regardless
// of scheduling. Any exception from the runner becomes a failed record for
// that question; other questions are unaffected.
std::vector<RunRecord> run_benchmark(
    const std::vector<Question>& questions,
    const std::function<RunRecord(const Question&)>& runner, int parallelism);

}  // namespace ioeval
