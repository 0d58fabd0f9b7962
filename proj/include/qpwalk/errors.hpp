#pragma once

#include <stdexcept>
#include <string>

namespace qpwalk {

enum class Errc {
  NegativeEntry,
  NonStochastic,
  ForbiddenTransition,
  ParseError,
  WindowTooSmall,
  InvalidArgument,
  ZeroDenominator,
  DegenerateDenominator,
  DegenerateQuadratic,
  NotErgodic,
  ZeroMeanDrift,
  PairOutOfRange,
  ConditionsUnmet,
  InconsistentBoundary,
  NonTerminating,
  RootOutOfRange,
  OriginEquationsUnsatisfied,
  NonSummable,
  SingularSystem,
  CompletionInfeasible,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::NonStochastic: return "NonStochastic";
    case Errc::ForbiddenTransition: return "ForbiddenTransition";
    case Errc::ParseError: return "ParseError";
    case Errc::WindowTooSmall: return "WindowTooSmall";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::DegenerateQuadratic: return "DegenerateQuadratic";
    case Errc::NotErgodic: return "NotErgodic";
    case Errc::ZeroMeanDrift: return "ZeroMeanDrift";
    case Errc::PairOutOfRange: return "PairOutOfRange";
    case Errc::ConditionsUnmet: return "ConditionsUnmet";
    case Errc::InconsistentBoundary: return "InconsistentBoundary";
    case Errc::NonTerminating: return "NonTerminating";
    case Errc::RootOutOfRange: return "RootOutOfRange";
    case Errc::OriginEquationsUnsatisfied: return "OriginEquationsUnsatisfied";
    case Errc::NonSummable: return "NonSummable";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::CompletionInfeasible: return "CompletionInfeasible";
  }
  return "Unknown";
}

/// Library error type. `code` identifies the failure class so callers and
/// tests can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// True when the failure is a malformed input rather than a domain result.
  bool is_input_error() const noexcept {
    switch (code_) {
      case Errc::NegativeEntry:
      case Errc::NonStochastic:
      case Errc::ForbiddenTransition:
      case Errc::ParseError:
      case Errc::WindowTooSmall:
      case Errc::InvalidArgument:
        return true;
      default:
        return false;
    }
  }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qpwalk
