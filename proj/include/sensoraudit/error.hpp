#pragma once

#include <stdexcept>
#include <string>

namespace sensoraudit {

// Values mirror sa_status in sensoraudit.h; the CLI uses them as exit codes.
enum class ErrorCode : int {
  kMissingFile = 10,
  kMalformedRow = 11,
  kInconsistentChannelCount = 12,
  kUnknownClassLabel = 13,
  kTrimExceedsLength = 14,
  kInvalidSpec = 15,
  kWindowTooShort = 20,
  kTooFewRows = 30,
  kMismatchedColumns = 31,
  kTooFewClasses = 32,
  kIndexOutOfRange = 40,
  kEmptySpec = 41,
  kTopologyMismatch = 42,
  kEmptyTrainingSet = 50,
  kSingleClassTraining = 51,
  kLengthMismatch = 52,
  kOutputExists = 60,
  kIoError = 61,
  kInvalidArgument = 62,
};

const char* error_code_name(ErrorCode code) noexcept;

class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sensoraudit
