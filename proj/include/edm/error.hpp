#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edm {

enum class ErrorCode {
  InvalidArgument,
  MalformedRow,
  UnknownSubject,
  DuplicateEntry,
  OutOfRangeMarks,
  InfeasibleSpec,
  EmptyDatabase,
  MissingSubsetSupport,
  EmptyCatalog,
  SampleTooSmall,
  ZeroVariance,
  EmptySet,
  UnknownAttribute,
  EmptyTrainingSet,
  InconsistentSchema,
  MissingAttribute,
  EmptyInput,
  DimensionMismatch,
  TooFewPoints,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownSubject: return "UnknownSubject";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::OutOfRangeMarks: return "OutOfRangeMarks";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::EmptyDatabase: return "EmptyDatabase";
    case ErrorCode::MissingSubsetSupport: return "MissingSubsetSupport";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::InconsistentSchema: return "InconsistentSchema";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line` is the 1-based input line for
/// file-level errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(format(code, message, line)), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(ErrorCode code, const std::string& message, std::size_t line) {
    std::string out(to_string(code));
    if (line != 0) out += " at line " + std::to_string(line);
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::size_t line_;
};

}  // namespace edm
