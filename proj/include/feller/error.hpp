#pragma once

#include <stdexcept>
#include <string>

namespace feller {

enum class ErrorCode {
  ParseError,
  ValidationError,
  NonPositiveValue,
  DomainExceeded,
  PoleViolation,
  NonPositive,
  EvaluationFailure,
  SingularCoefficient,
  NonPositivePotential,
  ConjugatePoint,
  HypothesisFailure,
  RangeViolation,
  NotSubsolution,
  Inadmissible,
  MonotonicityFailure,
  EmptyList,
  Precondition,
  InternalConsistency,
};

[[nodiscard]] const char* to_string(ErrorCode code) noexcept;

/// Base class of every error raised by the toolkit. The code is stable and
/// is what reports and tests key on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the formula parser; carries the offending token and its offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string token, std::size_t position)
      : Error(ErrorCode::ParseError, message + " at offset " + std::to_string(position) +
                                         " (token '" + token + "')"),
        token_(std::move(token)),
        position_(position) {}

  [[nodiscard]] const std::string& token() const noexcept { return token_; }
  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::string token_;
  std::size_t position_;
};

/// The Jacobi solution vanished at `radius()`: the curvature bound admits no
/// complete comparison model.
class ConjugatePointError : public Error {
 public:
  explicit ConjugatePointError(double radius)
      : Error(ErrorCode::ConjugatePoint, "warping function vanishes at r = " + std::to_string(radius)),
        radius_(radius) {}

  [[nodiscard]] double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

}  // namespace feller
