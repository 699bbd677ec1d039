#include "ioeval/promptlib.hpp"

#include <cstring>

#include "ioeval/errors.hpp"
#include "ioeval/hash.hpp"

namespace ioeval {

namespace {

// Sentence group shared by the one-stage review templates.
constexpr char kIoeCore[] =
    "Review your previous answer. If you are very confident about your "
    "answer, maintain your answer. Otherwise, update your answer.";

std::string with_trigger(std::string text) {
  text += " ";
  text += kAnswerTrigger;
  return text;
}

bool ends_with(const std::string& s, const char* suffix) {
  size_t n = std::strlen(suffix);
  return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

}  // namespace

bool PromptTemplate::has_placeholder() const {
  return text.find(kQuestionPlaceholder) != std::string::npos;
}

PromptCatalog::PromptCatalog() {
  auto add = [this](std::string name, std::string text, bool appends) {
    templates_.push_back({std::move(name), std::move(text), appends});
  };

  add("STANDARD", "{question}", true);
  add("STANDARD_COT", "{question} Explain your reasoning step-by-step.", true);

  add("IOE", with_trigger(kIoeCore), true);
  add("IOE_NO_VERY",
      with_trigger("Review your previous answer. If you are confident about "
                   "your answer, maintain your answer. Otherwise, update "
                   "your answer."),
      true);
  add("IOE_PLEASE",
      with_trigger("Please review your previous answer. If you are very "
                   "confident about your answer, please maintain your "
                   "answer. Otherwise, please update your answer."),
      true);
  add("IOE_FIND_PROBLEMS",
      with_trigger("Review your previous answer. If you are very confident "
                   "about your answer, maintain your answer. Otherwise, find "
                   "your problems and update your answer."),
      true);
  add("IOE_COT",
      with_trigger(std::string(kIoeCore) +
                   " Explain your reasoning step-by-step."),
      true);
  // The instruction that produced the rephrased form; kept for reference,
  // runs use IOE_RAR_REPHRASED.
  add("IOE_RAR_ORIGINAL",
      "\"" + with_trigger(kIoeCore) +
          "\" Rephrase and expand the question, and respond.",
      false);
  add("IOE_RAR_REPHRASED",
      with_trigger(
          "Critically assess your earlier response, identifying any "
          "deficiencies or inaccuracies present in your answer. Elaborate on "
          "the process of self-evaluation, emphasizing the significance of "
          "recognizing and addressing potential issues to enhance the "
          "overall quality and reliability of the information provided."),
      true);

  add("IOE_TWO_STAGE_REVIEW", kIoeCore, false);
  add("IOE_TWO_STAGE_UPDATE",
      with_trigger("Based on the problems you found if any, update your "
                   "answer. Please reiterate your answer."),
      true);

  add("DECISION",
      "You have provided two different answers in previous responses. Review "
      "the problem and your answers again, and provide the best answer.",
      true);

  // Combined two-sentence form; the gated protocol and the ablations use
  // CRITICAL_ONE_STAGE instead.
  add("CRITICAL_SIMPLE",
      "There are some problems in your previous answer. Find problems with "
      "your answer and improve your answer.",
      true);
  add("CRITICAL_ONE_STAGE",
      with_trigger("Review your previous answer and find problems with your "
                   "answer. Based on the problems you found, improve your "
                   "answer. Please reiterate your answer."),
      true);
  add("CRITICAL_TWO_STAGE_FIND",
      "Review your previous answer and find problems with your answer.",
      false);
  add("CRITICAL_TWO_STAGE_IMPROVE",
      with_trigger("Based on the problems you found, improve your answer. "
                   "Please reiterate your answer."),
      true);
}

const PromptCatalog& PromptCatalog::instance() {
  static const PromptCatalog catalog;
  return catalog;
}

const PromptTemplate& PromptCatalog::get(const std::string& name) const {
  for (const auto& t : templates_) {
    if (t.name == name) return t;
  }
  throw UnknownVariant("no prompt template named \"" + name + "\"");
}

nlohmann::ordered_json PromptCatalog::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& t : templates_) {
    out[t.name] = {{"text", t.text}, {"appends_trigger", t.appends_trigger}};
  }
  return out;
}

std::string PromptCatalog::hash() const { return sha256_hex(to_json().dump()); }

std::string render(const PromptTemplate& tmpl,
                   const std::optional<std::string>& question) {
  std::string out = tmpl.text;
  size_t pos = out.find(kQuestionPlaceholder);
  if (pos != std::string::npos && !question) {
    throw MissingBinding("template \"" + tmpl.name +
                         "\" requires a question binding");
  }
  constexpr size_t kPlaceholderLen =
      sizeof(kQuestionPlaceholder) / sizeof(char) - 1;
  while (pos != std::string::npos) {
    out.replace(pos, kPlaceholderLen, *question);
    pos = out.find(kQuestionPlaceholder, pos + question->size());
  }
  if (tmpl.appends_trigger && !ends_with(out, kAnswerTrigger)) {
    out = with_trigger(std::move(out));
  }
  return out;
}

PipelineSpec build_pipeline(const std::string& variant) {
  auto stage = [](const char* name) {
    return PipelineStage{name, StageCondition::always()};
  };

  PipelineSpec spec;
  spec.name = variant;
  if (variant == "standard") {
    spec.stages = {stage("STANDARD")};
  } else if (variant == "standard_cot") {
    spec.stages = {stage("STANDARD_COT")};
  } else if (variant == "ioe") {
    spec.stages = {stage("STANDARD"), stage("IOE")};
  } else if (variant == "ioe_with_decision") {
    spec.stages = {stage("STANDARD"), stage("IOE"),
                   PipelineStage{"DECISION", StageCondition::if_mismatch(1, 2)}};
  } else if (variant == "critical_one_stage") {
    spec.stages = {stage("STANDARD"), stage("CRITICAL_ONE_STAGE")};
  } else if (variant == "critical_two_stage") {
    spec.stages = {stage("STANDARD"), stage("CRITICAL_TWO_STAGE_FIND"),
                   stage("CRITICAL_TWO_STAGE_IMPROVE")};
  } else if (variant == "ioe_two_stage") {
    spec.stages = {stage("STANDARD"), stage("IOE_TWO_STAGE_REVIEW"),
                   stage("IOE_TWO_STAGE_UPDATE")};
  } else if (variant == "ioe_no_very") {
    spec.stages = {stage("STANDARD"), stage("IOE_NO_VERY")};
  } else if (variant == "ioe_please") {
    spec.stages = {stage("STANDARD"), stage("IOE_PLEASE")};
  } else if (variant == "ioe_find_problems") {
    spec.stages = {stage("STANDARD"), stage("IOE_FIND_PROBLEMS")};
  } else if (variant == "ioe_cot") {
    spec.stages = {stage("STANDARD"), stage("IOE_COT")};
  } else if (variant == "ioe_rar") {
    spec.stages = {stage("STANDARD"), stage("IOE_RAR_REPHRASED")};
  } else {
    throw UnknownVariant("no pipeline variant named \"" + variant + "\"");
  }
  return spec;
}

const std::vector<std::string>& pipeline_variants() {
  static const std::vector<std::string> kVariants = {
      "standard",        "ioe",        "ioe_with_decision",
      "critical_one_stage", "critical_two_stage", "ioe_two_stage",
      "ioe_no_very",     "ioe_please", "ioe_find_problems",
      "ioe_cot",         "ioe_rar",    "standard_cot",
  };
  return kVariants;
}

}  // namespace ioeval
