#ifndef EDUML_ERROR_H_
#define EDUML_ERROR_H_

#include <stdexcept>
#include <string>

namespace eduml {

enum class ErrorCode {
  // Ingestion and table construction.
  kIo,
  kMissingHeader,
  kMalformedRow,
  kMalformedCell,
  kUnknownColumnInSchema,
  kMissingColumn,
  kDuplicateColumn,
  kTypeMismatch,
  kSchemaError,
  // Dataset transforms.
  kDuplicateKey,
  kKeyMissing,
  kEmptyGroupColumn,
  kScoreOutOfRange,
  kDegenerateDistribution,
  kSingleClass,
  kAllMissingColumn,
  kTooFewRows,
  kEmptyInput,
  // Models and interpretation.
  kEmptyNode,
  kFeatureMismatch,
  kEmptyBackground,
  kTooManyFeatures,
  kNotASingleTree,
  kNonConvergence,
  // Statistics.
  kDegenerateTable,
  kAllValuesIdentical,
  kZeroWithinVariance,
  // Configuration.
  kInvalidParameter,
  kInvalidConfig,
  kEmptyGrid,
};

// Coarse grouping used for process exit status.
enum class ErrorCategory { kConfig, kData, kNumeric };

const char* error_code_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

// Exit status for the command-line tool: 2 config, 3 data, 4 numeric.
int exit_status(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

  // Same error with "[context] " prepended to the message.
  Error with_context(const std::string& context) const;

 private:
  ErrorCode code_;
};

}  // namespace eduml

#endif  // EDUML_ERROR_H_
