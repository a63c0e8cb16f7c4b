#include "fredkit/error.hpp"

namespace fredkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::EvaluationError: return "evaluation-error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::WrongDecomposition: return "wrong-decomposition";
    case ErrorKind::DefectiveSuspected: return "defective-suspected";
    case ErrorKind::NoSpectrum: return "no-spectrum";
    case ErrorKind::ClusteringError: return "clustering-error";
    case ErrorKind::IllConditionedChain: return "ill-conditioned-chain";
    case ErrorKind::UnsupportedProfile: return "unsupported-profile";
    case ErrorKind::EigenvalueProximity: return "eigenvalue-proximity";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::NoSolution: return "no-solution";
    case ErrorKind::StartingVector: return "starting-vector";
    case ErrorKind::NotConverged: return "not-converged";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace fredkit
