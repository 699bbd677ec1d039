#include "ioeval/benchmarks.hpp"

#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ioeval/errors.hpp"
#include "ioeval/serialization.hpp"
#include "ioeval/strings.hpp"

namespace ioeval {

namespace {

using json = nlohmann::ordered_json;

std::string padded_id(const std::string& prefix, size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", index);
  return prefix + "-" + buf;
}

std::string json_field_as_string(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string first_present(const json& obj, std::initializer_list<const char*> keys, long line) {
  for (const char* key : keys) {
    if (obj.contains(key)) return json_field_as_string(obj, key);
  }
  std::string wanted;
  for (const char* key : keys) wanted += std::string(wanted.empty() ? "" : "/") + key;
  throw ParseError("missing field " + wanted, line);
}

// HotpotQA context is either a plain string or the nested
// [[title, [sentence, ...]], ...] layout of the published files.
std::string flatten_context(const json& context) {
  if (context.is_string()) return context.get<std::string>();
  std::string out;
  if (context.is_array()) {
    for (const json& entry : context) {
      if (entry.is_string()) {
        if (!out.empty()) out += " ";
        out += entry.get<std::string>();
      } else if (entry.is_array()) {
        std::string part = flatten_context(entry);
        if (!part.empty()) {
          if (!out.empty()) out += " ";
          out += part;
        }
      }
    }
  }
  return out;
}

std::vector<Question> load_jsonl(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::vector<Question> questions;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw ParseError("invalid JSON object in " + path.string(), line_no);
    }
    try {
      if (format == DatasetFormat::kGsm8k) {
        Question q;
        q.id = padded_id("gsm8k", questions.size());
        q.text = json_field_as_string(obj, "question");
        std::string answer = json_field_as_string(obj, "answer");
        size_t pos = answer.rfind("#### ");
        if (pos == std::string::npos) throw ParseError("no #### delimiter in answer", line_no);
        q.gold = trim(answer.substr(pos + 5));
        q.kind = AnswerKind::kNumeric;
        q.benchmark = "gsm8k";
        questions.push_back(std::move(q));
      } else {
        questions.push_back(question_from_json(obj));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(std::string(e.what()) + " in " + path.string(), line_no);
    }
  }
  return questions;
}

std::vector<Question> load_array(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc = json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw ParseError("expected a JSON array in " + path.string(), 1);
  }
  std::vector<Question> questions;
  long index = 0;
  for (const json& obj : doc) {
    ++index;
    if (!obj.is_object()) throw ParseError("expected an object element", index);
    Question q;
    switch (format) {
      case DatasetFormat::kSvamp: {
        q.id = obj.contains("ID") ? json_field_as_string(obj, "ID") : padded_id("svamp", questions.size());
        std::string body = obj.contains("Body") ? json_field_as_string(obj, "Body") : "";
        std::string question_text = first_present(obj, {"Question", "question"}, index);
        q.text = body.empty() ? question_text : trim(body) + " " + question_text;
        q.gold = first_present(obj, {"Answer", "answer"}, index);
        q.kind = AnswerKind::kNumeric;
        q.benchmark = "svamp";
        break;
      }
      case DatasetFormat::kHotpotQa: {
        q.id = obj.contains("id") ? json_field_as_string(obj, "id") : padded_id("hotpotqa", questions.size());
        q.text = first_present(obj, {"question"}, index);
        if (obj.contains("context")) {
          std::string context = flatten_context(obj.at("context"));
          if (!context.empty()) q.text = context + "\n\n" + q.text;
        }
        q.gold = first_present(obj, {"answer"}, index);
        q.kind = AnswerKind::kFreeText;
        q.benchmark = "hotpotqa";
        break;
      }
      case DatasetFormat::kSports: {
        q.id = obj.contains("id") ? json_field_as_string(obj, "id") : padded_id("sports", questions.size());
        q.text = first_present(obj, {"question", "input"}, index);
        q.gold = first_present(obj, {"answer", "target"}, index);
        q.kind = AnswerKind::kYesNo;
        q.benchmark = "sports";
        break;
      }
      case DatasetFormat::kLlc: {
        q.id = obj.contains("id") ? json_field_as_string(obj, "id") : padded_id("llc", questions.size());
        q.text = first_present(obj, {"question", "input"}, index);
        q.gold = first_present(obj, {"answer", "target"}, index);
        q.kind = AnswerKind::kFreeText;
        q.benchmark = "llc";
        break;
      }
      default:
        throw ParseError("unsupported array format", index);
    }
    questions.push_back(std::move(q));
  }
  return questions;
}

}  // namespace

std::string to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kGsm8k: return "gsm8k";
    case DatasetFormat::kSvamp: return "svamp";
    case DatasetFormat::kHotpotQa: return "hotpotqa";
    case DatasetFormat::kSports: return "sports";
    case DatasetFormat::kLlc: return "llc";
    case DatasetFormat::kGeneric: return "generic";
  }
  throw Error("unreachable dataset format");
}

DatasetFormat dataset_format_from_string(const std::string& s) {
  if (s == "gsm8k") return DatasetFormat::kGsm8k;
  if (s == "svamp") return DatasetFormat::kSvamp;
  if (s == "hotpotqa") return DatasetFormat::kHotpotQa;
  if (s == "sports") return DatasetFormat::kSports;
  if (s == "llc") return DatasetFormat::kLlc;
  if (s == "generic") return DatasetFormat::kGeneric;
  throw ConfigError("unknown dataset format: " + s);
}

std::vector<Question> load_benchmark(const std::filesystem::path& path, DatasetFormat format) {
  std::vector<Question> questions;
  if (format == DatasetFormat::kGsm8k || format == DatasetFormat::kGeneric) {
    questions = load_jsonl(path, format);
  } else {
    questions = load_array(path, format);
  }
  if (questions.empty()) throw EmptyDataset("no questions in " + path.string());
  return questions;
}

const std::array<int, 100>& gsm8k_100_indices() {
  static const std::array<int, 100> kIndices = {
      5,    18,   31,   45,   47,   52,   54,   55,   108,  141,   //
      152,  161,  184,  186,  202,  231,  247,  254,  270,  299,   //
      308,  381,  399,  406,  412,  416,  418,  420,  425,  434,   //
      465,  466,  487,  489,  491,  500,  512,  513,  528,  529,   //
      535,  536,  567,  580,  597,  619,  649,  658,  689,  693,   //
      695,  729,  785,  789,  790,  805,  814,  867,  880,  884,   //
      892,  911,  922,  938,  950,  969,  975,  977,  984,  987,   //
      996,  1018, 1021, 1061, 1069, 1086, 1096, 1109, 1112, 1122,  //
      1127, 1128, 1133, 1137, 1148, 1158, 1175, 1187, 1188, 1202,  //
      1218, 1219, 1222, 1226, 1250, 1259, 1268, 1291, 1301, 1312,
  };
  return kIndices;
}

std::vector<Question> select_gsm8k_100(const std::vector<Question>& questions) {
  const auto& indices = gsm8k_100_indices();
  std::vector<Question> selected;
  selected.reserve(indices.size());
  for (int index : indices) {
    if (index < 0 || static_cast<size_t>(index) >= questions.size()) {
      throw IndexOutOfRange("index " + std::to_string(index) + " outside dataset of " +
                            std::to_string(questions.size()) + " questions; expected the full test set");
    }
    selected.push_back(questions[static_cast<size_t>(index)]);
  }
  return selected;
}

std::vector<Question> generate_open_tasks(const OpenTaskSpec& spec) {
  if (spec.count < 1) throw ConfigError("open task count must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::vector<Question> questions;
  questions.reserve(static_cast<size_t>(spec.count));
  constexpr int kRange = OpenTaskSpec::kBetaHigh - OpenTaskSpec::kBetaLow + 1;
  for (int i = 0; i < spec.count; ++i) {
    int beta = OpenTaskSpec::kBetaLow + static_cast<int>(rng() % kRange);
    Question q;
    q.id = padded_id("open", static_cast<size_t>(i));
    q.text = "Can you provide a year which is not a leap year and can be divided by " +
             std::to_string(beta) + "?";
    q.kind = AnswerKind::kOpenVerified;
    q.benchmark = "open";
    q.open_beta = beta;
    questions.push_back(std::move(q));
  }
  return questions;
}

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

bool verify_open_answer(const CanonicalAnswer& answer, int beta) {
  if (beta < OpenTaskSpec::kBetaLow || beta > OpenTaskSpec::kBetaHigh) {
    throw Error("beta outside [2, 10]: " + std::to_string(beta));
  }
  // The whole answer must be one positive integer; digit-group commas are
  // tolerated ("1,995" names a year as clearly as "1995").
  std::string digits;
  for (char c : answer.value) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
    } else if (c != ',') {
      throw NotAYear("not a positive integer year: \"" + answer.value + "\"");
    }
  }
  if (digits.empty() || digits.size() > 9) {
    throw NotAYear("not a positive integer year: \"" + answer.value + "\"");
  }
  int year = std::stoi(digits);
  if (year < 1) throw NotAYear("not a positive integer year: \"" + answer.value + "\"");
  return !is_leap_year(year) && year % beta == 0;
}

}  // namespace ioeval
