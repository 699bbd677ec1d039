#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ioeval/extraction.hpp"

namespace ioeval {

// One benchmark item. gold is present exactly when kind != OpenVerified;
// open_beta is present exactly when kind == OpenVerified.
struct Question {
  std::string id;
  std::string text;
  std::optional<std::string> gold;
  AnswerKind kind = AnswerKind::kFreeText;
  std::string benchmark;
  std::optional<int> open_beta;
};

enum class DatasetFormat { kGsm8k, kSvamp, kHotpotQa, kSports, kLlc, kGeneric };

std::string to_string(DatasetFormat format);
DatasetFormat dataset_format_from_string(const std::string& s);

// Adapters:
//   gsm8k     JSON-lines {question, answer}; gold is the text after the final "#### "
//   svamp     JSON array  {ID?, Body?, Question, Answer} (or {question, answer}); Numeric
//   hotpotqa  JSON array  {id?, question, answer, context?}; FreeText; context is
//             prepended to the question text
//   sports    JSON array  {id?, question|input, answer|target}; YesNo
//   llc       JSON array  {id?, question|input, answer}; FreeText
//   generic   JSON-lines  {id, text, gold?, kind, benchmark, open_beta?}
// Throws ParseError (with line number) or EmptyDataset.
std::vector<Question> load_benchmark(const std::filesystem::path& path, DatasetFormat format);

// The fixed 100-question subset of the GSM8K test set, as 0-based positions
// in the published 1319-question file, ascending.
const std::array<int, 100>& gsm8k_100_indices();

// Picks the 100 fixed indices out of the full test set, preserving order.
// Throws IndexOutOfRange when the input is not the full set.
std::vector<Question> select_gsm8k_100(const std::vector<Question>& questions);

struct OpenTaskSpec {
  int count = 100;
  std::uint64_t seed = 0;
  static constexpr int kBetaLow = 2;
  static constexpr int kBetaHigh = 10;
};

// Deterministic for a given seed; every beta is uniform over [2, 10].
std::vector<Question> generate_open_tasks(const OpenTaskSpec& spec);

// Gregorian rule for all years.
bool is_leap_year(int year);

// True iff the answer is a non-leap year divisible by beta.
// Throws NotAYear when the answer is not a positive integer.
bool verify_open_answer(const CanonicalAnswer& answer, int beta);

}  // namespace ioeval
