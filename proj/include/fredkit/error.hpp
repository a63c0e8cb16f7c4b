#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fredkit {

/// Failure categories reported by every module. The CLI prints the
/// category name in its diagnostics.
enum class ErrorKind {
  InvalidArgument,
  PreconditionViolation,
  EvaluationError,
  Unsupported,
  DivisionByZero,
  WrongDecomposition,
  DefectiveSuspected,
  NoSpectrum,
  ClusteringError,
  IllConditionedChain,
  UnsupportedProfile,
  EigenvalueProximity,
  Pole,
  NoSolution,
  StartingVector,
  NotConverged,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::InvalidArgument, message);
}

}  // namespace fredkit
