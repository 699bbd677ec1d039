#include "ioeval/pipeline.hpp"

#include <atomic>
#include <thread>

#include "ioeval/errors.hpp"

namespace ioeval {

namespace {

// False instead of throwing when the question carries nothing to score
// against; load_benchmark guarantees gold/beta for its formats, but generic
// datasets may omit gold.
bool scored_correct(const std::optional<CanonicalAnswer>& answer,
                    const Question& question) {
  if (!answer) return false;
  if (question.kind != AnswerKind::kOpenVerified && !question.gold) {
    return false;
  }
  return is_correct(*answer, question);
}

// Both present and equal; a missing answer can never be confirmed stable.
bool stable_pair(const std::optional<CanonicalAnswer>& a,
                 const std::optional<CanonicalAnswer>& b) {
  return a && b && answers_match(*a, *b);
}

void extract_into(StageResult& stage, AnswerKind kind) {
  try {
    stage.raw_answer = extract_marked_answer(stage.response_text);
    stage.canonical_answer = canonicalize(*stage.raw_answer, kind);
  } catch (const Error& e) {
    stage.extraction_error = e.what();
  }
}

// Stage 2 measures self-assessed confidence when it asks the model to review
// and still demands a marked answer.
bool is_self_assessment_pipeline(const PipelineSpec& spec) {
  if (spec.stages.size() < 2) return false;
  const PromptTemplate& second =
      PromptCatalog::instance().get(spec.stages[1].template_name);
  return second.name.rfind("IOE", 0) == 0 && second.appends_trigger;
}

}  // namespace

std::string to_string(ConfidenceLabel::Variant v) {
  return v == ConfidenceLabel::Variant::kConfident ? "confident"
                                                   : "unconfident";
}

std::string to_string(ConfidenceLabel::Method m) {
  return m == ConfidenceLabel::Method::kSelfAssessment ? "self_assessment"
                                                       : "consistency_checking";
}

ConfidenceLabel::Variant confidence_variant_from_string(const std::string& s) {
  if (s == "confident") return ConfidenceLabel::Variant::kConfident;
  if (s == "unconfident") return ConfidenceLabel::Variant::kUnconfident;
  throw Error("unknown confidence variant: " + s);
}

ConfidenceLabel::Method confidence_method_from_string(const std::string& s) {
  if (s == "self_assessment") return ConfidenceLabel::Method::kSelfAssessment;
  if (s == "consistency_checking") {
    return ConfidenceLabel::Method::kConsistencyChecking;
  }
  throw Error("unknown confidence method: " + s);
}

RunRecord run_pipeline(const Question& question, const PipelineSpec& spec,
                       ChatBackend& backend, const ChatParams& params) {
  const PromptCatalog& catalog = PromptCatalog::instance();

  RunRecord record;
  record.question_id = question.id;
  record.pipeline_name = spec.name;

  std::vector<ChatMessage> conversation;
  for (const PipelineStage& stage_spec : spec.stages) {
    StageResult stage;
    stage.template_name = stage_spec.template_name;

    if (stage_spec.condition.kind == StageCondition::Kind::kIfMismatch) {
      size_t ia = stage_spec.condition.stage_a;
      size_t ib = stage_spec.condition.stage_b;
      if (ia < 1 || ib < 1 || ia > record.stages.size() ||
          ib > record.stages.size()) {
        throw Error("stage condition in \"" + spec.name +
                    "\" references a stage that has not run");
      }
      const auto& a = record.stages[ia - 1];
      const auto& b = record.stages[ib - 1];
      if (stable_pair(a.canonical_answer, b.canonical_answer)) {
        record.stages.push_back(std::move(stage));  // skipped
        continue;
      }
    }

    const PromptTemplate& tmpl = catalog.get(stage_spec.template_name);
    stage.prompt_sent =
        tmpl.has_placeholder() ? render(tmpl, question.text) : render(tmpl);

    conversation.push_back({"user", stage.prompt_sent});
    ChatResult result;
    try {
      result = backend.complete(conversation, params);
    } catch (const BackendError& e) {
      record.failed = true;
      record.error = e.what();
      record.stages.push_back(std::move(stage));
      break;
    }
    conversation.push_back({"assistant", result.content});

    stage.executed = true;
    stage.response_text = result.content;
    stage.latency_ms = result.latency_ms;
    stage.prompt_tokens = result.prompt_tokens;
    stage.completion_tokens = result.completion_tokens;
    extract_into(stage, question.kind);
    record.stages.push_back(std::move(stage));
  }

  for (const StageResult& stage : record.stages) {
    if (stage.executed && stage.canonical_answer) {
      record.final_answer = stage.canonical_answer;
    }
  }
  record.correct_initial = scored_correct(
      record.stages.empty() ? std::nullopt : record.stages[0].canonical_answer,
      question);
  record.correct_final = scored_correct(record.final_answer, question);

  if (!record.failed && is_self_assessment_pipeline(spec) &&
      record.stages.size() >= 2 && record.stages[1].executed) {
    record.confidence = assess_confidence_self(record);
  }
  return record;
}

ConfidenceLabel assess_confidence_self(const RunRecord& record) {
  if (record.stages.size() < 2) {
    throw InsufficientStages("self-assessment needs two stages, record for " +
                             record.question_id + " has " +
                             std::to_string(record.stages.size()));
  }
  ConfidenceLabel label;
  label.method = ConfidenceLabel::Method::kSelfAssessment;
  label.variant = stable_pair(record.stages[0].canonical_answer,
                              record.stages[1].canonical_answer)
                      ? ConfidenceLabel::Variant::kConfident
                      : ConfidenceLabel::Variant::kUnconfident;
  return label;
}

ConfidenceLabel assess_confidence_consistency(const Question& question,
                                              ChatBackend& backend,
                                              const ChatParams& params,
                                              const ConsistencyConfig& cfg) {
  if (cfg.n < 2) {
    throw ConfigError("consistency checking needs n >= 2, got " +
                      std::to_string(cfg.n));
  }
  const PromptTemplate& standard = PromptCatalog::instance().get("STANDARD");
  std::string prompt = render(standard, question.text);

  ConfidenceLabel label;
  label.method = ConfidenceLabel::Method::kConsistencyChecking;
  for (int i = 0; i < cfg.n; ++i) {
    std::vector<ChatMessage> conversation = {{"user", prompt}};
    ChatResult result = backend.complete(conversation, params);
    try {
      RawAnswer raw = extract_marked_answer(result.content);
      label.evidence.push_back(canonicalize(raw, question.kind));
    } catch (const Error&) {
      label.evidence.push_back(std::nullopt);
    }
  }

  bool consistent = true;
  for (size_t i = 0; consistent && i < label.evidence.size(); ++i) {
    consistent = stable_pair(label.evidence[0], label.evidence[i]);
  }
  label.variant = consistent ? ConfidenceLabel::Variant::kConfident
                             : ConfidenceLabel::Variant::kUnconfident;
  return label;
}

RunRecord run_gated_critical(const Question& question, ChatBackend& backend,
                             const ChatParams& params,
                             const ConsistencyConfig& cfg) {
  constexpr char kName[] = "gated_critical";

  ConfidenceLabel label;
  try {
    label = assess_confidence_consistency(question, backend, params, cfg);
  } catch (const BackendError& e) {
    RunRecord record;
    record.question_id = question.id;
    record.pipeline_name = kName;
    record.failed = true;
    record.error = e.what();
    return record;
  }

  bool confident = label.variant == ConfidenceLabel::Variant::kConfident;
  RunRecord record = run_pipeline(
      question, build_pipeline(confident ? "standard" : "critical_one_stage"),
      backend, params);
  record.pipeline_name = kName;
  record.confidence = std::move(label);
  return record;
}

std::vector<RunRecord> run_benchmark(
    const std::vector<Question>& questions,
    const std::function<RunRecord(const Question&)>& runner, int parallelism) {
  if (parallelism < 1) {
    throw ConfigError("parallelism must be >= 1, got " +
                      std::to_string(parallelism));
  }

  std::vector<RunRecord> records(questions.size());
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < questions.size();
         i = next.fetch_add(1)) {
      try {
        records[i] = runner(questions[i]);
      } catch (const std::exception& e) {
        RunRecord failed;
        failed.question_id = questions[i].id;
        failed.failed = true;
        failed.error = e.what();
        records[i] = std::move(failed);
      }
    }
  };

  size_t n_threads = std::min<size_t>(parallelism, questions.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return records;
}

}  // namespace ioeval
