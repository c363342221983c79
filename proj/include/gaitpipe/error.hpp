#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitpipe {

enum class ErrorCode {
  FormatError,
  EmptyInput,
  DuplicateTimestamp,
  CalibrationError,
  InvalidArgument,
  LengthMismatch,
  KernelTooLarge,
  SignalTooShort,
  TooFewFrames,
  NoStepsDetected,
  BothZero,
  ScenarioInvalid,
  EmptyEvaluation,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace gaitpipe
