#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geproci {

enum class ErrorKind {
  NonPrimeModulus,
  ReducibleModulus,
  NotASubfield,
  WrongCharacteristic,
  TooLarge,
  EqualPoints,
  DimensionMismatch,
  DependentDirection,
  ZeroInput,
  LimitExceeded,
  CollisionDetected,
  NoCurveOfDegree,
  AllPairsShareComponent,
  LengthMismatch,
  SharedGeneratorMissing,
  ParseError,
  InvalidArgument,
};

inline std::string_view error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonPrimeModulus: return "NonPrimeModulus";
    case ErrorKind::ReducibleModulus: return "ReducibleModulus";
    case ErrorKind::NotASubfield: return "NotASubfield";
    case ErrorKind::WrongCharacteristic: return "WrongCharacteristic";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EqualPoints: return "EqualPoints";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DependentDirection: return "DependentDirection";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::LimitExceeded: return "LimitExceeded";
    case ErrorKind::CollisionDetected: return "CollisionDetected";
    case ErrorKind::NoCurveOfDegree: return "NoCurveOfDegree";
    case ErrorKind::AllPairsShareComponent: return "AllPairsShareComponent";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SharedGeneratorMissing: return "SharedGeneratorMissing";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Library error carrying a machine-readable kind; the kind name is what
/// ends up in JSON reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace geproci
