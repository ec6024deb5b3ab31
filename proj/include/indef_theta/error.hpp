#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indef_theta {

enum class ErrorCode {
  // input / schema
  ParseError,
  SchemaError,
  DimensionMismatch,
  NotSymmetric,
  OddDiagonal,
  WrongSignature,
  Singular,
  LevelTooLarge,
  NotNegativeNorm,
  WrongComponent,
  NotInGamma0N,
  NotHomogeneous,
  DegreeMismatch,
  NotInSubspace,
  SubspaceNotInvariant,
  NotInDualLattice,
  InvalidAutomorphism,
  LinearlyDependent,
  NegativeArgument,
  PerfectSquare,
  UnknownExample,
  RingMismatch,
  // mathematical failures
  SingularOperator,
  NonUnitLeading,
  BoundTooLarge,
  ConditionViolated,
  IdentityMismatch,
  ToleranceUnreachable,
  Overflow,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::SchemaError: return "SchemaError";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::NotSymmetric: return "NotSymmetric";
  case ErrorCode::OddDiagonal: return "OddDiagonal";
  case ErrorCode::WrongSignature: return "WrongSignature";
  case ErrorCode::Singular: return "Singular";
  case ErrorCode::LevelTooLarge: return "LevelTooLarge";
  case ErrorCode::NotNegativeNorm: return "NotNegativeNorm";
  case ErrorCode::WrongComponent: return "WrongComponent";
  case ErrorCode::NotInGamma0N: return "NotInGamma0N";
  case ErrorCode::NotHomogeneous: return "NotHomogeneous";
  case ErrorCode::DegreeMismatch: return "DegreeMismatch";
  case ErrorCode::NotInSubspace: return "NotInSubspace";
  case ErrorCode::SubspaceNotInvariant: return "SubspaceNotInvariant";
  case ErrorCode::NotInDualLattice: return "NotInDualLattice";
  case ErrorCode::InvalidAutomorphism: return "InvalidAutomorphism";
  case ErrorCode::LinearlyDependent: return "LinearlyDependent";
  case ErrorCode::NegativeArgument: return "NegativeArgument";
  case ErrorCode::PerfectSquare: return "PerfectSquare";
  case ErrorCode::UnknownExample: return "UnknownExample";
  case ErrorCode::RingMismatch: return "RingMismatch";
  case ErrorCode::SingularOperator: return "SingularOperator";
  case ErrorCode::NonUnitLeading: return "NonUnitLeading";
  case ErrorCode::BoundTooLarge: return "BoundTooLarge";
  case ErrorCode::ConditionViolated: return "ConditionViolated";
  case ErrorCode::IdentityMismatch: return "IdentityMismatch";
  case ErrorCode::ToleranceUnreachable: return "ToleranceUnreachable";
  case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

/// True for errors caused by malformed or invalid input (CLI exit code 2);
/// everything else is a mathematical failure (exit code 1).
constexpr bool is_input_error(ErrorCode code) {
  switch (code) {
  case ErrorCode::SingularOperator:
  case ErrorCode::NonUnitLeading:
  case ErrorCode::BoundTooLarge:
  case ErrorCode::ConditionViolated:
  case ErrorCode::IdentityMismatch:
  case ErrorCode::ToleranceUnreachable:
  case ErrorCode::Overflow:
    return false;
  default:
    return true;
  }
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

} // namespace indef_theta
