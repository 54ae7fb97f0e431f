#include "instascope/error.hpp"

namespace instascope {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kNonNumericFeature: return "NonNumericFeature";
    case ErrorCode::kUnknownOutcomeToken: return "UnknownOutcomeToken";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kAllColumnsConstant: return "AllColumnsConstant";
    case ErrorCode::kZeroNormRow: return "ZeroNormRow";
    case ErrorCode::kSingleClassOutcome: return "SingleClassOutcome";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::kSingleClassLabels: return "SingleClassLabels";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kPoolTooSmall: return "PoolTooSmall";
    case ErrorCode::kNoPositivesInGroup: return "NoPositivesInGroup";
  }
  return "Unknown";
}

}  // namespace instascope
