#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace instascope {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kMissingColumn,
  kDuplicateId,
  kNonNumericFeature,
  kUnknownOutcomeToken,
  kEmptyCorpus,
  kEmptyInput,
  kAllColumnsConstant,
  kZeroNormRow,
  kSingleClassOutcome,
  kTooFewRows,
  kDimensionMismatch,
  kDegenerateBoundary,
  kSingleClassLabels,
  kEmptyPool,
  kPoolTooSmall,
  kNoPositivesInGroup,
};

std::string_view ToString(ErrorCode code);

// All library failures surface as this exception; `code()` is the stable
// machine-readable part, `what()` names the offending row/column/value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the pipeline: wraps an Error with the name of the stage that
// produced it ("load", "standardize", "selection", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), "[" + stage + "] " + cause.what()),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace instascope
