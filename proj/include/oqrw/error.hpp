#pragma once

#include <stdexcept>
#include <string>

namespace oqrw {

enum class ErrorCode {
  NotHermitian,
  NegativeEigenvalue,
  NoConvergence,
  Singular,
  DimensionMismatch,
  NotTracePreserving,
  InvalidModel,
  InvalidState,
  NotAnEnclosure,
  SingularTransientSystem,
  NumericalDegeneracy,
  NotIrreducible,
  AssertionFailure,
  DegenerateStep,
  MissingTrack,
  MissingAxis,
  EmptyEnsemble,
  HorizonMismatch,
  Parse,
  Io,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; code() names the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotTracePreserving: return "NotTracePreserving";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotAnEnclosure: return "NotAnEnclosure";
    case ErrorCode::SingularTransientSystem: return "SingularTransientSystem";
    case ErrorCode::NumericalDegeneracy: return "NumericalDegeneracy";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
    case ErrorCode::DegenerateStep: return "DegenerateStep";
    case ErrorCode::MissingTrack: return "MissingTrack";
    case ErrorCode::MissingAxis: return "MissingAxis";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::HorizonMismatch: return "HorizonMismatch";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace oqrw
