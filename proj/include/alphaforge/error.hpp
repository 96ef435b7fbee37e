#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alphaforge {

enum class ErrorCode {
  MalformedRow,
  InvariantViolation,
  DuplicateDate,
  EmptyFile,
  DegenerateSplit,
  EmptyUniverse,
  SeriesTooShort,
  TooFewRows,
  EmptyDataset,
  SingleClassDataset,
  CorruptModelFile,
  SchemaVersionMismatch,
  InvalidProbabilities,
  ZeroAtr,
  OverdraftRejected,
  InsufficientHistory,
  UnmatchedSell,
  MissingRangeData,
  InvalidSpec,
  InvalidArgument,
  Config,
  MissingArtifact,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace alphaforge
