#include "feller/error.hpp"

namespace feller {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::DomainExceeded: return "DomainExceeded";
    case ErrorCode::PoleViolation: return "PoleViolation";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::SingularCoefficient: return "SingularCoefficient";
    case ErrorCode::NonPositivePotential: return "NonPositivePotential";
    case ErrorCode::ConjugatePoint: return "ConjugatePoint";
    case ErrorCode::HypothesisFailure: return "HypothesisFailure";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::NotSubsolution: return "NotSubsolution";
    case ErrorCode::Inadmissible: return "Inadmissible";
    case ErrorCode::MonotonicityFailure: return "MonotonicityFailure";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
  }
  return "Unknown";
}

}  // namespace feller
