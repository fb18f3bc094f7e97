#pragma once

#include <stdexcept>
#include <string>

namespace poselab {

enum class ErrorCode {
  ZeroNorm,
  NotUnit,
  NotARotation,
  HeadCountMismatch,
  NonDifferentiablePoint,
  NonFiniteEvaluation,
  NonFiniteLoss,
  DimensionMismatch,
  MalformedFile,
  BadQuaternion,
  EmptyTestSet,
  EmptyInput,
  SceneMismatch,
  InsufficientData,
  InvalidArgument,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-readable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace poselab
