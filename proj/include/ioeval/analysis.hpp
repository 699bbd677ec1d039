#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioeval/pipeline.hpp"

namespace ioeval {

enum class AnswerStage { kInitial, kFinal };

// Correct answers at the chosen stage over all records; a record whose
// answer is missing or unparsable counts in the denominator as incorrect.
// Throws EmptyInput.
double accuracy(const std::vector<RunRecord>& records, AnswerStage stage);

// How the final answer relates to the initial one. A fifth category beyond
// correct/incorrect crossings exists because open-ended tasks admit several
// correct answers: without it, changed-but-still-correct records would not
// fit any bucket and the counts would not partition the records.
enum class Transition {
  kNoChange,
  kCorrectToIncorrect,
  kIncorrectToCorrect,
  kIncorrectToIncorrect,
  kCorrectToCorrectChanged,
};
inline constexpr int kTransitionCount = 5;

std::string to_string(Transition t);

// NoChange iff initial and final answers are both present and equal; any
// missing answer counts as a change. Other cases classify by
// (correct_initial, correct_final).
Transition classify_transition(const RunRecord& record);

struct TransitionCounts {
  std::array<long, kTransitionCount> counts{};

  long& operator[](Transition t) { return counts[static_cast<size_t>(t)]; }
  long operator[](Transition t) const {
    return counts[static_cast<size_t>(t)];
  }
  long total() const;
};

TransitionCounts transition_counts(const std::vector<RunRecord>& records);

struct SubgroupStats {
  long n = 0;
  double acc_initial = 0.0;
  double acc_final = 0.0;
};

// Pooled per-variant stats. Empty groups are absent from the map rather
// than reported as a fabricated 0.0 rate. Throws UnlabeledRecord when any
// record lacks a confidence label.
std::map<ConfidenceLabel::Variant, SubgroupStats> subgroup_accuracy(
    const std::vector<RunRecord>& records);

using BoolLabeler = std::function<bool(const RunRecord&)>;

struct ConfusionMatrix2x2 {
  // Axis names plus what true/false mean on each, e.g. rows
  // "confident"/"unconfident", columns "correct"/"incorrect".
  std::string row_axis;
  std::string row_true, row_false;
  std::string col_axis;
  std::string col_true, col_false;
  long cells[2][2] = {{0, 0}, {0, 0}};  // [row ? 0 : 1][col ? 0 : 1]

  long count(bool row, bool col) const {
    return cells[row ? 0 : 1][col ? 0 : 1];
  }
  long total() const;
};

ConfusionMatrix2x2 confusion(const std::vector<RunRecord>& records,
                             ConfusionMatrix2x2 axes,
                             const BoolLabeler& row_labeler,
                             const BoolLabeler& col_labeler);

struct NormalizationInputs {
  double p1 = 0.0;      // our standard-prompt accuracy
  double p1_hat = 0.0;  // baseline standard-prompt accuracy, > 0
  double p3_hat = 0.0;  // baseline corrected accuracy
};

// p3_hat * p1 / p1_hat, unclamped: rescales the baseline's corrected
// accuracy so both runs agree on the standard prompt. Callers rendering
// reports clamp at 1.0 (with a warning); throws Error on out-of-range
// inputs.
double normalize_baseline(const NormalizationInputs& inputs);

enum class ReportFormat { kMarkdown, kCsv, kJson };

ReportFormat report_format_from_string(const std::string& s);

// Everything a report shows, computed from records plus run-log header
// metadata. Recomputing from the same log reproduces it byte-for-byte.
struct EvalSummary {
  std::string pipeline;
  std::string model_id;
  std::string dataset;
  std::string timestamp;

  long n_records = 0;
  long n_failed = 0;
  long correct_initial = 0;
  long correct_final = 0;
  double acc_initial = 0.0;
  double acc_final = 0.0;
  TransitionCounts transitions;

  // Present iff every record carries a confidence label of one method.
  std::optional<std::string> confidence_method;
  std::map<ConfidenceLabel::Variant, SubgroupStats> subgroups;
  std::optional<ConfusionMatrix2x2> confusion_initial;
  std::optional<ConfusionMatrix2x2> confusion_final;

  // Template names in first-use order across the records' stages.
  std::vector<std::string> used_templates;
  nlohmann::ordered_json prompt_catalog;
  std::string prompt_catalog_hash;
};

EvalSummary summarize(const std::vector<RunRecord>& records,
                      const nlohmann::ordered_json& log_header);

std::string emit_report(const EvalSummary& summary, ReportFormat format);

struct ComparisonInputs {
  long n_questions = 0;
  double p1 = 0.0;      // our run, initial accuracy
  double p3 = 0.0;      // our run, final accuracy
  double p1_hat = 0.0;  // baseline run, initial accuracy
  double p3_hat = 0.0;  // baseline run, final accuracy
};

// The three-row comparison (standard / + baseline, normalized / + ours).
// The normalized value is clamped at 1.0 in the rendering, with a warning
// line when clamping happened.
std::string render_comparison(const ComparisonInputs& inputs,
                              ReportFormat format);

}  // namespace ioeval
