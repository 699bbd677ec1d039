#include "ioeval/analysis.hpp"

#include <cstdio>

#include "ioeval/errors.hpp"
#include "ioeval/promptlib.hpp"

namespace ioeval {

namespace {

using nlohmann::ordered_json;

std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string format_double(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

const std::optional<CanonicalAnswer>& initial_answer(const RunRecord& record) {
  static const std::optional<CanonicalAnswer> kNone;
  return record.stages.empty() ? kNone : record.stages[0].canonical_answer;
}

// Human-facing transition names for tables; to_string() stays machine-keyed.
const char* transition_title(Transition t) {
  switch (t) {
    case Transition::kNoChange: return "no change";
    case Transition::kCorrectToIncorrect: return "correct -> incorrect";
    case Transition::kIncorrectToCorrect: return "incorrect -> correct";
    case Transition::kIncorrectToIncorrect: return "incorrect -> incorrect";
    case Transition::kCorrectToCorrectChanged:
      return "correct -> correct (changed)";
  }
  return "?";
}

bool is_confident(const RunRecord& record) {
  return record.confidence &&
         record.confidence->variant == ConfidenceLabel::Variant::kConfident;
}

ConfusionMatrix2x2 confidence_axes(const char* col_axis) {
  ConfusionMatrix2x2 axes;
  axes.row_axis = "confidence";
  axes.row_true = "confident";
  axes.row_false = "unconfident";
  axes.col_axis = col_axis;
  axes.col_true = "correct";
  axes.col_false = "incorrect";
  return axes;
}

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void csv_row(std::string& out, const std::string& section,
             const std::string& key, const std::string& value) {
  out += csv_escape(section);
  out += ',';
  out += csv_escape(key);
  out += ',';
  out += csv_escape(value);
  out += '\n';
}

std::string group_name(ConfidenceLabel::Variant v) { return to_string(v); }

ordered_json subgroup_json(const SubgroupStats& stats) {
  return {{"n", stats.n},
          {"acc_initial", stats.acc_initial},
          {"acc_final", stats.acc_final}};
}

ordered_json confusion_json(const ConfusionMatrix2x2& m) {
  ordered_json j = ordered_json::object();
  j["rows"] = {{"axis", m.row_axis}, {"true", m.row_true}, {"false", m.row_false}};
  j["cols"] = {{"axis", m.col_axis}, {"true", m.col_true}, {"false", m.col_false}};
  j["cells"] = {{m.row_true + "_" + m.col_true, m.cells[0][0]},
                {m.row_true + "_" + m.col_false, m.cells[0][1]},
                {m.row_false + "_" + m.col_true, m.cells[1][0]},
                {m.row_false + "_" + m.col_false, m.cells[1][1]}};
  return j;
}

void markdown_confusion(std::string& out, const std::string& title,
                        const ConfusionMatrix2x2& m) {
  out += "## " + title + "\n\n";
  out += "| " + m.row_axis + " \\ " + m.col_axis + " | " + m.col_true +
         " | " + m.col_false + " |\n";
  out += "| --- | --- | --- |\n";
  out += "| " + m.row_true + " | " + std::to_string(m.cells[0][0]) + " | " +
         std::to_string(m.cells[0][1]) + " |\n";
  out += "| " + m.row_false + " | " + std::to_string(m.cells[1][0]) + " | " +
         std::to_string(m.cells[1][1]) + " |\n\n";
}

void csv_confusion(std::string& out, const std::string& section,
                   const ConfusionMatrix2x2& m) {
  csv_row(out, section, m.row_true + "_" + m.col_true,
          std::to_string(m.cells[0][0]));
  csv_row(out, section, m.row_true + "_" + m.col_false,
          std::to_string(m.cells[0][1]));
  csv_row(out, section, m.row_false + "_" + m.col_true,
          std::to_string(m.cells[1][0]));
  csv_row(out, section, m.row_false + "_" + m.col_false,
          std::to_string(m.cells[1][1]));
}

std::string emit_markdown(const EvalSummary& s) {
  std::string out;
  out += "# Evaluation report\n\n";

  out += "## Run\n\n";
  out += "| field | value |\n| --- | --- |\n";
  out += "| pipeline | " + s.pipeline + " |\n";
  out += "| model | " + s.model_id + " |\n";
  out += "| dataset | " + s.dataset + " |\n";
  out += "| timestamp | " + s.timestamp + " |\n";
  out += "| records | " + std::to_string(s.n_records) + " |\n";
  out += "| failed | " + std::to_string(s.n_failed) + " |\n";
  out += "| prompt catalog | " + s.prompt_catalog_hash + " |\n\n";
  if (s.n_failed > 0) {
    out += "**Warning:** " + std::to_string(s.n_failed) +
           " record(s) failed; they count as incorrect at every stage.\n\n";
  }

  out += "## Accuracy\n\n";
  out += "| stage | accuracy |\n| --- | --- |\n";
  out += "| initial | " + format_pct(s.acc_initial) + " (" +
         std::to_string(s.correct_initial) + "/" +
         std::to_string(s.n_records) + ") |\n";
  out += "| final | " + format_pct(s.acc_final) + " (" +
         std::to_string(s.correct_final) + "/" + std::to_string(s.n_records) +
         ") |\n\n";

  out += "## Answer transitions\n\n";
  out += "| transition | count | share |\n| --- | --- | --- |\n";
  for (int i = 0; i < kTransitionCount; ++i) {
    Transition t = static_cast<Transition>(i);
    long count = s.transitions[t];
    out += "| " + std::string(transition_title(t)) + " | " +
           std::to_string(count) + " | " +
           format_pct(static_cast<double>(count) / s.n_records) + " |\n";
  }
  out += "\n";

  if (s.confidence_method) {
    out += "## Confidence subgroups (" + *s.confidence_method + ")\n\n";
    out += "| group | n | initial accuracy | final accuracy |\n";
    out += "| --- | --- | --- | --- |\n";
    for (auto variant : {ConfidenceLabel::Variant::kConfident,
                         ConfidenceLabel::Variant::kUnconfident}) {
      auto it = s.subgroups.find(variant);
      if (it == s.subgroups.end()) {
        out += "| " + group_name(variant) + " | absent | absent | absent |\n";
      } else {
        out += "| " + group_name(variant) + " (" +
               std::to_string(it->second.n) + "/" +
               std::to_string(s.n_records) + ") | " +
               std::to_string(it->second.n) + " | " +
               format_pct(it->second.acc_initial) + " | " +
               format_pct(it->second.acc_final) + " |\n";
      }
    }
    out += "\n";
  }
  if (s.confusion_initial) {
    markdown_confusion(out, "Confidence vs. initial correctness",
                       *s.confusion_initial);
  }
  if (s.confusion_final) {
    markdown_confusion(out, "Confidence vs. final correctness",
                       *s.confusion_final);
  }

  out += "## Prompts\n\n";
  for (const auto& name : s.used_templates) {
    out += "### " + name + "\n\n";
    std::string text = s.prompt_catalog.contains(name)
                           ? s.prompt_catalog[name]["text"].get<std::string>()
                           : "";
    out += "```\n" + text + "\n```\n\n";
  }
  return out;
}

std::string emit_csv(const EvalSummary& s) {
  std::string out = "section,key,value\n";
  csv_row(out, "run", "pipeline", s.pipeline);
  csv_row(out, "run", "model", s.model_id);
  csv_row(out, "run", "dataset", s.dataset);
  csv_row(out, "run", "timestamp", s.timestamp);
  csv_row(out, "run", "records", std::to_string(s.n_records));
  csv_row(out, "run", "failed", std::to_string(s.n_failed));
  csv_row(out, "run", "prompt_catalog_hash", s.prompt_catalog_hash);

  csv_row(out, "accuracy", "initial_correct",
          std::to_string(s.correct_initial));
  csv_row(out, "accuracy", "initial", format_double(s.acc_initial));
  csv_row(out, "accuracy", "final_correct", std::to_string(s.correct_final));
  csv_row(out, "accuracy", "final", format_double(s.acc_final));

  for (int i = 0; i < kTransitionCount; ++i) {
    Transition t = static_cast<Transition>(i);
    csv_row(out, "transition", to_string(t), std::to_string(s.transitions[t]));
  }

  if (s.confidence_method) {
    csv_row(out, "subgroup", "method", *s.confidence_method);
    for (auto variant : {ConfidenceLabel::Variant::kConfident,
                         ConfidenceLabel::Variant::kUnconfident}) {
      auto it = s.subgroups.find(variant);
      std::string name = group_name(variant);
      if (it == s.subgroups.end()) {
        csv_row(out, "subgroup", name + "_n", "0");
        continue;
      }
      csv_row(out, "subgroup", name + "_n", std::to_string(it->second.n));
      csv_row(out, "subgroup", name + "_acc_initial",
              format_double(it->second.acc_initial));
      csv_row(out, "subgroup", name + "_acc_final",
              format_double(it->second.acc_final));
    }
  }
  if (s.confusion_initial) {
    csv_confusion(out, "confusion_initial", *s.confusion_initial);
  }
  if (s.confusion_final) {
    csv_confusion(out, "confusion_final", *s.confusion_final);
  }

  for (const auto& name : s.used_templates) {
    std::string text = s.prompt_catalog.contains(name)
                           ? s.prompt_catalog[name]["text"].get<std::string>()
                           : "";
    csv_row(out, "prompt", name, text);
  }
  return out;
}

std::string emit_json(const EvalSummary& s) {
  ordered_json j = ordered_json::object();
  j["run"] = {{"pipeline", s.pipeline},
              {"model", s.model_id},
              {"dataset", s.dataset},
              {"timestamp", s.timestamp},
              {"records", s.n_records},
              {"failed", s.n_failed}};
  j["accuracy"] = {{"initial", s.acc_initial},
                   {"initial_correct", s.correct_initial},
                   {"final", s.acc_final},
                   {"final_correct", s.correct_final}};
  ordered_json transitions = ordered_json::object();
  for (int i = 0; i < kTransitionCount; ++i) {
    Transition t = static_cast<Transition>(i);
    transitions[to_string(t)] = s.transitions[t];
  }
  j["transitions"] = std::move(transitions);

  if (s.confidence_method) {
    ordered_json groups = ordered_json::object();
    groups["method"] = *s.confidence_method;
    for (auto variant : {ConfidenceLabel::Variant::kConfident,
                         ConfidenceLabel::Variant::kUnconfident}) {
      auto it = s.subgroups.find(variant);
      groups[group_name(variant)] =
          it == s.subgroups.end() ? ordered_json(nullptr)
                                  : subgroup_json(it->second);
    }
    j["subgroups"] = std::move(groups);
  }
  if (s.confusion_initial || s.confusion_final) {
    ordered_json confusions = ordered_json::object();
    if (s.confusion_initial) {
      confusions["initial"] = confusion_json(*s.confusion_initial);
    }
    if (s.confusion_final) {
      confusions["final"] = confusion_json(*s.confusion_final);
    }
    j["confusions"] = std::move(confusions);
  }

  j["prompts"] = {{"used", s.used_templates},
                  {"catalog_hash", s.prompt_catalog_hash},
                  {"catalog", s.prompt_catalog}};
  return j.dump(2) + "\n";
}

}  // namespace

double accuracy(const std::vector<RunRecord>& records, AnswerStage stage) {
  if (records.empty()) throw EmptyInput("no records to measure accuracy on");
  long correct = 0;
  for (const auto& record : records) {
    correct += stage == AnswerStage::kInitial ? record.correct_initial
                                              : record.correct_final;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::string to_string(Transition t) {
  switch (t) {
    case Transition::kNoChange: return "no_change";
    case Transition::kCorrectToIncorrect: return "correct_to_incorrect";
    case Transition::kIncorrectToCorrect: return "incorrect_to_correct";
    case Transition::kIncorrectToIncorrect: return "incorrect_to_incorrect";
    case Transition::kCorrectToCorrectChanged:
      return "correct_to_correct_changed";
  }
  throw Error("unreachable transition");
}

Transition classify_transition(const RunRecord& record) {
  const auto& initial = initial_answer(record);
  const auto& final = record.final_answer;
  bool unchanged = false;
  if (initial && final) {
    try {
      unchanged = answers_match(*initial, *final);
    } catch (const KindMismatch&) {
      unchanged = false;
    }
  }
  if (unchanged) return Transition::kNoChange;
  if (record.correct_initial) {
    return record.correct_final ? Transition::kCorrectToCorrectChanged
                                : Transition::kCorrectToIncorrect;
  }
  return record.correct_final ? Transition::kIncorrectToCorrect
                              : Transition::kIncorrectToIncorrect;
}

long TransitionCounts::total() const {
  long sum = 0;
  for (long c : counts) sum += c;
  return sum;
}

TransitionCounts transition_counts(const std::vector<RunRecord>& records) {
  TransitionCounts counts;
  for (const auto& record : records) ++counts[classify_transition(record)];
  return counts;
}

std::map<ConfidenceLabel::Variant, SubgroupStats> subgroup_accuracy(
    const std::vector<RunRecord>& records) {
  struct Sums {
    long n = 0, initial = 0, final = 0;
  };
  std::map<ConfidenceLabel::Variant, Sums> sums;
  for (const auto& record : records) {
    if (!record.confidence) {
      throw UnlabeledRecord("record " + record.question_id +
                            " has no confidence label");
    }
    Sums& group = sums[record.confidence->variant];
    ++group.n;
    group.initial += record.correct_initial;
    group.final += record.correct_final;
  }
  std::map<ConfidenceLabel::Variant, SubgroupStats> out;
  for (const auto& [variant, group] : sums) {
    out[variant] = {group.n,
                    static_cast<double>(group.initial) / group.n,
                    static_cast<double>(group.final) / group.n};
  }
  return out;
}

ConfusionMatrix2x2 confusion(const std::vector<RunRecord>& records,
                             ConfusionMatrix2x2 axes,
                             const BoolLabeler& row_labeler,
                             const BoolLabeler& col_labeler) {
  for (const auto& record : records) {
    ++axes.cells[row_labeler(record) ? 0 : 1][col_labeler(record) ? 0 : 1];
  }
  return axes;
}

long ConfusionMatrix2x2::total() const {
  return cells[0][0] + cells[0][1] + cells[1][0] + cells[1][1];
}

double normalize_baseline(const NormalizationInputs& inputs) {
  if (inputs.p1 < 0.0 || inputs.p1 > 1.0) {
    throw Error("p1 outside [0, 1]: " + format_double(inputs.p1));
  }
  if (inputs.p1_hat <= 0.0 || inputs.p1_hat > 1.0) {
    throw Error("p1_hat outside (0, 1]: " + format_double(inputs.p1_hat));
  }
  if (inputs.p3_hat < 0.0 || inputs.p3_hat > 1.0) {
    throw Error("p3_hat outside [0, 1]: " + format_double(inputs.p3_hat));
  }
  return inputs.p3_hat * inputs.p1 / inputs.p1_hat;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  throw ConfigError("unknown report format: " + s);
}

EvalSummary summarize(const std::vector<RunRecord>& records,
                      const nlohmann::ordered_json& log_header) {
  if (records.empty()) {
    throw EmptyInput(
        "run log contains no records; run an evaluation first or check the "
        "log path");
  }

  EvalSummary s;
  // Headers come from run logs, but an in-memory caller may have none.
  const ordered_json header =
      log_header.is_object() ? log_header : ordered_json::object();
  const ordered_json config = header.value("config", ordered_json::object());
  s.pipeline = config.value("pipeline", "");
  if (config.contains("backend") && config["backend"].is_object()) {
    s.model_id = config["backend"].value("model_id", "");
  }
  if (config.contains("dataset") && config["dataset"].is_object()) {
    s.dataset = config["dataset"].value("path", "");
  }
  s.timestamp = header.value("timestamp", "");

  s.n_records = static_cast<long>(records.size());
  for (const auto& record : records) {
    s.n_failed += record.failed;
    s.correct_initial += record.correct_initial;
    s.correct_final += record.correct_final;
  }
  s.acc_initial = accuracy(records, AnswerStage::kInitial);
  s.acc_final = accuracy(records, AnswerStage::kFinal);
  s.transitions = transition_counts(records);

  bool all_labeled = true;
  bool same_method = true;
  for (const auto& record : records) {
    if (!record.confidence) {
      all_labeled = false;
      break;
    }
    same_method = same_method &&
                  record.confidence->method == records[0].confidence->method;
  }
  if (all_labeled) {
    s.confidence_method =
        same_method ? to_string(records[0].confidence->method) : "mixed";
    s.subgroups = subgroup_accuracy(records);
    s.confusion_initial = confusion(
        records, confidence_axes("initial answer"), is_confident,
        [](const RunRecord& r) { return r.correct_initial; });
    s.confusion_final = confusion(
        records, confidence_axes("final answer"), is_confident,
        [](const RunRecord& r) { return r.correct_final; });
  }

  for (const auto& record : records) {
    for (const auto& stage : record.stages) {
      bool seen = false;
      for (const auto& name : s.used_templates) {
        seen = seen || name == stage.template_name;
      }
      if (!seen) s.used_templates.push_back(stage.template_name);
    }
  }

  const PromptCatalog& catalog = PromptCatalog::instance();
  s.prompt_catalog = catalog.to_json();
  s.prompt_catalog_hash = header.value("prompt_catalog_hash", catalog.hash());
  return s;
}

std::string emit_report(const EvalSummary& summary, ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown: return emit_markdown(summary);
    case ReportFormat::kCsv: return emit_csv(summary);
    case ReportFormat::kJson: return emit_json(summary);
  }
  throw Error("unreachable report format");
}

std::string render_comparison(const ComparisonInputs& inputs,
                              ReportFormat format) {
  double raw = normalize_baseline(
      {inputs.p1, inputs.p1_hat, inputs.p3_hat});
  bool clamped = raw > 1.0;
  double normalized = clamped ? 1.0 : raw;

  if (format == ReportFormat::kMarkdown) {
    std::string out = "# Comparison\n\n";
    out += "Over " + std::to_string(inputs.n_questions) +
           " shared questions.\n\n";
    out += "| prompt | accuracy |\n| --- | --- |\n";
    out += "| Standard Prompt | " + format_pct(inputs.p1) + " |\n";
    out += "| + Critical Prompt (baseline, normalized) | " +
           format_pct(normalized) + " |\n";
    out += "| + IoE Prompt (ours) | " + format_pct(inputs.p3) + " |\n\n";
    out += "Normalized baseline = p3_hat * p1 / p1_hat = " +
           format_double(inputs.p3_hat) + " * " + format_double(inputs.p1) +
           " / " + format_double(inputs.p1_hat) + " = " + format_double(raw) +
           ".\n";
    out += "Baseline raw accuracies: standard " + format_pct(inputs.p1_hat) +
           ", corrected " + format_pct(inputs.p3_hat) + ".\n";
    if (clamped) {
      out += "\n**Warning:** normalized value " + format_double(raw) +
             " exceeds 1; clamped to 1.0.\n";
    }
    return out;
  }
  if (format == ReportFormat::kCsv) {
    std::string out = "section,key,value\n";
    csv_row(out, "comparison", "n_questions",
            std::to_string(inputs.n_questions));
    csv_row(out, "comparison", "p1", format_double(inputs.p1));
    csv_row(out, "comparison", "p3", format_double(inputs.p3));
    csv_row(out, "comparison", "p1_hat", format_double(inputs.p1_hat));
    csv_row(out, "comparison", "p3_hat", format_double(inputs.p3_hat));
    csv_row(out, "comparison", "normalized_baseline_raw", format_double(raw));
    csv_row(out, "comparison", "normalized_baseline",
            format_double(normalized));
    csv_row(out, "comparison", "clamped", clamped ? "true" : "false");
    return out;
  }
  ordered_json j = ordered_json::object();
  j["n_questions"] = inputs.n_questions;
  j["p1"] = inputs.p1;
  j["p3"] = inputs.p3;
  j["p1_hat"] = inputs.p1_hat;
  j["p3_hat"] = inputs.p3_hat;
  j["normalized_baseline_raw"] = raw;
  j["normalized_baseline"] = normalized;
  j["clamped"] = clamped;
  return j.dump(2) + "\n";
}

}  // namespace ioeval
