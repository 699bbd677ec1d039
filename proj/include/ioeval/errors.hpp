#pragma once

#include <stdexcept>
#include <string>

namespace ioeval {

// Common base so callers can catch everything from this library at once.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- extraction ---
struct MissingAnswerMarker : Error {
  using Error::Error;
};
struct UnparsableAnswer : Error {
  using Error::Error;
};
struct KindMismatch : Error {
  using Error::Error;
};

// --- promptlib ---
struct MissingBinding : Error {
  using Error::Error;
};
struct UnknownVariant : Error {
  using Error::Error;
};

// --- backend ---
// Base for everything the chat backend can raise; a pipeline records these
// on the run record instead of propagating past the question.
struct BackendError : Error {
  using Error::Error;
};
struct NetworkError : BackendError {
  using BackendError::BackendError;
};
struct RateLimited : BackendError {
  using BackendError::BackendError;
};
struct MalformedResponse : BackendError {
  using BackendError::BackendError;
};
struct ScriptMiss : BackendError {
  using BackendError::BackendError;
};

// --- pipeline ---
struct InsufficientStages : Error {
  using Error::Error;
};

// --- benchmarks ---
struct ParseError : Error {
  ParseError(const std::string& message, long line) : Error(message + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};
struct EmptyDataset : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct NotAYear : Error {
  using Error::Error;
};

// --- analysis ---
struct EmptyInput : Error {
  using Error::Error;
};
struct UnlabeledRecord : Error {
  using Error::Error;
};

// --- cli / persistence ---
struct ConfigError : Error {
  using Error::Error;
};
struct DatasetMismatch : Error {
  using Error::Error;
};
struct CorruptLog : Error {
  CorruptLog(const std::string& message, long line) : Error(message + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace ioeval
