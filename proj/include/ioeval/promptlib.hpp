#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ioeval {

// Sentence that makes the model close its reply with a "## ... ##" span.
// Appended (space-separated) to every template whose appends_trigger is set,
// unless the template text already ends with it.
inline constexpr char kAnswerTrigger[] =
    "Your final answer should be put between two ## symbols, like "
    "## ANSWER ##, at the end of your response.";

inline constexpr char kQuestionPlaceholder[] = "{question}";

struct PromptTemplate {
  std::string name;
  std::string text;  // may contain {question}
  bool appends_trigger = false;

  bool has_placeholder() const;
};

// Immutable, name-keyed set of every prompt used by the protocols.
class PromptCatalog {
 public:
  static const PromptCatalog& instance();

  // Throws UnknownVariant for names not in the catalog.
  const PromptTemplate& get(const std::string& name) const;
  const std::vector<PromptTemplate>& all() const { return templates_; }

  // name -> {text, appends_trigger}, in catalog order. Embedded in reports.
  nlohmann::ordered_json to_json() const;
  // SHA-256 of the serialized catalog; run logs carry it so a log can be
  // matched to the exact prompt set that produced it.
  std::string hash() const;

 private:
  PromptCatalog();
  std::vector<PromptTemplate> templates_;
};

// Substitutes {question}, then appends the answer trigger if the template
// asks for it and its text does not already end with the trigger.
// Throws MissingBinding when text contains {question} but no question given.
std::string render(const PromptTemplate& tmpl,
                   const std::optional<std::string>& question = std::nullopt);

struct StageCondition {
  enum class Kind { kAlways, kIfMismatch };
  Kind kind = Kind::kAlways;
  // 1-based indices of the two earlier stages whose answers are compared;
  // the stage runs only if they mismatch. Meaningful iff kind == kIfMismatch.
  int stage_a = 0;
  int stage_b = 0;

  static StageCondition always() { return {}; }
  static StageCondition if_mismatch(int a, int b) {
    return {Kind::kIfMismatch, a, b};
  }
};

struct PipelineStage {
  std::string template_name;
  StageCondition condition;
};

struct PipelineSpec {
  std::string name;
  std::vector<PipelineStage> stages;
};

// Stage lists for the named protocol variants. Throws UnknownVariant.
PipelineSpec build_pipeline(const std::string& variant);

// Every variant build_pipeline accepts, in a stable order.
const std::vector<std::string>& pipeline_variants();

}  // namespace ioeval
