#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace geocomplete {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Machine-readable failure modes. The CLI maps these onto process exit codes.
enum class ErrorCode {
  ParseError,            // malformed spec file / bracket list
  InvariantViolation,    // Jacobi failure, asymmetry beyond tolerance, ...
  DegenerateMetric,      // metric matrix singular (or singular where inversion is required)
  IntegratorError,       // bad options, insufficient tail, ...
  NotUnimodular,
  NotE11,
  NotSL2R,
  DegenerateKilling,
  IllConditionedMetric,
  AmbiguousSpectrum,     // eigenvalue clustering cannot be decided at eig_tol
  DependentSpan,
  ResidualTooHigh,
  BadParams,
  BadOptions,
  InsufficientTail,
  InternalInconsistency, // closed-form criterion vs numerical search disagree
  DegenerateInput,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::IntegratorError: return "IntegratorError";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotE11: return "NotE11";
    case ErrorCode::NotSL2R: return "NotSL2R";
    case ErrorCode::DegenerateKilling: return "DegenerateKilling";
    case ErrorCode::IllConditionedMetric: return "IllConditionedMetric";
    case ErrorCode::AmbiguousSpectrum: return "AmbiguousSpectrum";
    case ErrorCode::DependentSpan: return "DependentSpan";
    case ErrorCode::ResidualTooHigh: return "ResidualTooHigh";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BadOptions: return "BadOptions";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
  }
  return "Unknown";
}

}  // namespace geocomplete
