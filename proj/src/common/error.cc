#include "eduml/error.h"

namespace eduml {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMissingHeader: return "MissingHeader";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kMalformedCell: return "MalformedCell";
    case ErrorCode::kUnknownColumnInSchema: return "UnknownColumnInSchema";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDuplicateColumn: return "DuplicateColumn";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kKeyMissing: return "KeyMissing";
    case ErrorCode::kEmptyGroupColumn: return "EmptyGroupColumn";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kAllMissingColumn: return "AllMissingColumn";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyNode: return "EmptyNode";
    case ErrorCode::kFeatureMismatch: return "FeatureMismatch";
    case ErrorCode::kEmptyBackground: return "EmptyBackground";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kNotASingleTree: return "NotASingleTree";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kDegenerateTable: return "DegenerateTable";
    case ErrorCode::kAllValuesIdentical: return "AllValuesIdentical";
    case ErrorCode::kZeroWithinVariance: return "ZeroWithinVariance";
    case ErrorCode::kInvalidParameter: return "InvalidParameter";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kEmptyGrid:
    case ErrorCode::kSchemaError:
      return ErrorCategory::kConfig;
    case ErrorCode::kNonConvergence:
      return ErrorCategory::kNumeric;
    default:
      return ErrorCategory::kData;
  }
}

int exit_status(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return 2;
    case ErrorCategory::kData: return 3;
    case ErrorCategory::kNumeric: return 4;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

Error Error::with_context(const std::string& context) const {
  Error out = *this;
  static_cast<std::runtime_error&>(out) =
      std::runtime_error("[" + context + "] " + what());
  return out;
}

}  // namespace eduml
