#include "poselab/error.hpp"

namespace poselab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::HeadCountMismatch: return "HeadCountMismatch";
    case ErrorCode::NonDifferentiablePoint: return "NonDifferentiablePoint";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::BadQuaternion: return "BadQuaternion";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SceneMismatch: return "SceneMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace poselab
