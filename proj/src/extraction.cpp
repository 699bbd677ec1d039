#include "ioeval/extraction.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "ioeval/benchmarks.hpp"
#include "ioeval/errors.hpp"
#include "ioeval/strings.hpp"

namespace ioeval {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// First decimal token: optional sign, digits with comma separators, optional
// fraction. A comma is consumed only when a digit follows, so list commas
// ("1, 2") end the token. A leading "." is accepted when it starts the token.
std::string canonicalize_numeric(const std::string& text) {
  size_t n = text.size();
  size_t first_digit = std::string::npos;
  for (size_t i = 0; i < n; ++i) {
    if (is_digit(text[i])) {
      first_digit = i;
      break;
    }
  }
  if (first_digit == std::string::npos) {
    throw UnparsableAnswer("no numeric token in \"" + text + "\"");
  }

  size_t start = first_digit;
  bool leading_dot = start > 0 && text[start - 1] == '.' && (start == 1 || !is_digit(text[start - 2]));
  if (leading_dot) start = first_digit - 1;

  bool negative = false;
  if (start > 0 && (text[start - 1] == '-' || text[start - 1] == '+')) {
    bool attached = start == 1 || !std::isalnum(static_cast<unsigned char>(text[start - 2]));
    if (attached) {
      negative = text[start - 1] == '-';
      --start;
    }
  }

  std::string int_part;
  std::string frac_part;
  size_t i = first_digit;
  if (!leading_dot) {
    while (i < n) {
      if (is_digit(text[i])) {
        int_part.push_back(text[i]);
        ++i;
      } else if (text[i] == ',' && i + 1 < n && is_digit(text[i + 1])) {
        ++i;  // thousands separator
      } else {
        break;
      }
    }
    if (i < n && text[i] == '.' && i + 1 < n && is_digit(text[i + 1])) {
      ++i;
      while (i < n && is_digit(text[i])) frac_part.push_back(text[i++]);
    }
  } else {
    i = first_digit;
    while (i < n && is_digit(text[i])) frac_part.push_back(text[i++]);
  }

  // Exact-decimal normal form: no leading zeros, no trailing fractional zeros.
  size_t keep = int_part.find_first_not_of('0');
  int_part = keep == std::string::npos ? "" : int_part.substr(keep);
  size_t last = frac_part.find_last_not_of('0');
  frac_part = last == std::string::npos ? "" : frac_part.substr(0, last + 1);
  if (int_part.empty()) int_part = "0";

  std::string value = int_part;
  if (!frac_part.empty()) value += "." + frac_part;
  if (value == "0") return value;  // -0 is stored as 0
  return negative ? "-" + value : value;
}

std::string canonicalize_yes_no(const std::string& text) {
  std::string trimmed = trim(text);
  size_t end = 0;
  while (end < trimmed.size() && !is_space(trimmed[end])) ++end;
  std::string token = trimmed.substr(0, end);
  while (!token.empty() && is_punct(token.back())) token.pop_back();
  while (!token.empty() && is_punct(token.front())) token.erase(token.begin());
  token = to_lower(token);
  if (token == "yes") return "true";
  if (token == "no") return "false";
  throw UnparsableAnswer("leading token is neither yes nor no in \"" + text + "\"");
}

std::string normalize_free_text(const std::string& text) {
  std::string s = collapse_whitespace(to_lower(text));
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && (is_punct(s[begin]) || is_space(s[begin]))) ++begin;
  while (end > begin && (is_punct(s[end - 1]) || is_space(s[end - 1]))) --end;
  std::string out = s.substr(begin, end - begin);
  if (out.empty()) throw UnparsableAnswer("no text content in \"" + text + "\"");
  return out;
}

}  // namespace

std::string to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::kNumeric: return "numeric";
    case AnswerKind::kYesNo: return "yes_no";
    case AnswerKind::kFreeText: return "free_text";
    case AnswerKind::kOpenVerified: return "open_verified";
  }
  throw Error("unreachable answer kind");
}

AnswerKind answer_kind_from_string(const std::string& s) {
  if (s == "numeric") return AnswerKind::kNumeric;
  if (s == "yes_no") return AnswerKind::kYesNo;
  if (s == "free_text") return AnswerKind::kFreeText;
  if (s == "open_verified") return AnswerKind::kOpenVerified;
  throw Error("unknown answer kind: " + s);
}

std::string rendered(const CanonicalAnswer& answer) {
  if (answer.kind == AnswerKind::kYesNo) return answer.value == "true" ? "yes" : "no";
  return answer.value;
}

RawAnswer extract_marked_answer(const std::string& response_text) {
  std::vector<size_t> markers;
  for (size_t i = 0; i + 1 < response_text.size();) {
    if (response_text[i] == '#' && response_text[i + 1] == '#') {
      markers.push_back(i);
      i += 2;
    } else {
      ++i;
    }
  }

  std::optional<std::string> best;
  for (size_t k = 0; k + 1 < markers.size(); k += 2) {
    size_t begin = markers[k] + 2;
    std::string interior = trim(response_text.substr(begin, markers[k + 1] - begin));
    if (!interior.empty()) best = std::move(interior);
  }
  if (!best) throw MissingAnswerMarker("no well-formed ## ... ## span in response");
  return RawAnswer{*std::move(best)};
}

CanonicalAnswer canonicalize(const RawAnswer& raw, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::kNumeric: return {kind, canonicalize_numeric(raw.text)};
    case AnswerKind::kYesNo: return {kind, canonicalize_yes_no(raw.text)};
    case AnswerKind::kFreeText:
    case AnswerKind::kOpenVerified: return {kind, normalize_free_text(raw.text)};
  }
  throw Error("unreachable answer kind");
}

bool answers_match(const CanonicalAnswer& a, const CanonicalAnswer& b) {
  if (a.kind != b.kind) {
    throw KindMismatch("cannot compare " + to_string(a.kind) + " with " + to_string(b.kind));
  }
  return a.value == b.value;
}

bool is_correct(const CanonicalAnswer& answer, const Question& question) {
  if (answer.kind != question.kind) {
    throw KindMismatch("answer kind " + to_string(answer.kind) + " does not match question kind " +
                       to_string(question.kind));
  }
  if (question.kind == AnswerKind::kOpenVerified) {
    if (!question.open_beta) throw Error("open question " + question.id + " has no beta");
    try {
      return verify_open_answer(answer, *question.open_beta);
    } catch (const NotAYear&) {
      return false;
    }
  }
  if (!question.gold) throw Error("question " + question.id + " has no gold answer");
  try {
    CanonicalAnswer gold = canonicalize(RawAnswer{*question.gold}, question.kind);
    return answers_match(answer, gold);
  } catch (const UnparsableAnswer&) {
    return false;
  }
}

}  // namespace ioeval
