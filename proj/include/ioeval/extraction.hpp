#pragma once

#include <string>

namespace ioeval {

struct Question;  // benchmarks.hpp

enum class AnswerKind { kNumeric, kYesNo, kFreeText, kOpenVerified };

std::string to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(const std::string& s);

// The text found between a pair of ## markers, trimmed. Never contains "##".
struct RawAnswer {
  std::string text;
};

// Kind-tagged normalized answer. Payloads:
//   Numeric      exact decimal string, no trailing fractional zeros, -0 stored as 0
//   YesNo        "true" or "false"
//   FreeText /
//   OpenVerified lowercase, whitespace-collapsed, edge punctuation stripped
struct CanonicalAnswer {
  AnswerKind kind;
  std::string value;

  friend bool operator==(const CanonicalAnswer&, const CanonicalAnswer&) = default;
};

// Text form that canonicalizes back to the same answer (e.g. "yes"/"no" for YesNo).
std::string rendered(const CanonicalAnswer& answer);

// Returns the content of the last well-formed `## ... ##` span. Markers are
// paired left to right; a span whose interior is blank is not well-formed.
// Throws MissingAnswerMarker when no well-formed span exists.
RawAnswer extract_marked_answer(const std::string& response_text);

// Throws UnparsableAnswer when no token of the required kind exists.
CanonicalAnswer canonicalize(const RawAnswer& raw, AnswerKind kind);

// Exact equality of canonical payloads; an equivalence relation per kind.
// Throws KindMismatch when kinds differ.
bool answers_match(const CanonicalAnswer& a, const CanonicalAnswer& b);

// For OpenVerified questions this delegates to verify_open_answer; otherwise
// compares against the canonicalized gold answer.
bool is_correct(const CanonicalAnswer& answer, const Question& question);

}  // namespace ioeval
