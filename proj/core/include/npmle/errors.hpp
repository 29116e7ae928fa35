#pragma once

#include <stdexcept>
#include <string>

namespace npmle {

enum class ErrorCode {
  NonPositiveWeight,
  DuplicateLocation,
  WeightSumMismatch,
  AtomCountMismatch,
  OrderTooLarge,
  InvalidInterval,
  EpsilonOutOfRange,
  ExtraPointOutOfRange,
  TooMuchMassDropped,
  NoConvergence,
  SingularJacobian,
  AtomCollision,
  SupportNotInS,
  UnknownDescriptor,
  RefinementExhausted,
  InvalidArgument,
};

/// All library failures are reported through this exception type; `code()`
/// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::DuplicateLocation: return "DuplicateLocation";
    case ErrorCode::WeightSumMismatch: return "WeightSumMismatch";
    case ErrorCode::AtomCountMismatch: return "AtomCountMismatch";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::ExtraPointOutOfRange: return "ExtraPointOutOfRange";
    case ErrorCode::TooMuchMassDropped: return "TooMuchMassDropped";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::AtomCollision: return "AtomCollision";
    case ErrorCode::SupportNotInS: return "SupportNotInS";
    case ErrorCode::UnknownDescriptor: return "UnknownDescriptor";
    case ErrorCode::RefinementExhausted: return "RefinementExhausted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace npmle
