#pragma once

#include <stdexcept>
#include <string>

namespace simop {

/// Failure modes of the similarity pipeline. The first group are violated
/// method preconditions (the potential is too large for the chosen window),
/// the second group are numerical breakdowns.
enum class FailureKind {
  NoAdmissibleM,
  NoAdmissibleK,
  ContractionViolated,
  MaxIterExceeded,
  BallEscape,
  InversionFailure,
  QuadratureNonConvergence,
  EigensolverFailure,
};

const char* to_string(FailureKind kind);

/// True for failures caused by an unmet precondition of the method rather
/// than by floating-point trouble.
bool is_precondition_failure(FailureKind kind);

class MethodError : public std::runtime_error {
 public:
  MethodError(FailureKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}

  FailureKind kind() const noexcept { return kind_; }
  /// Diagnostic quantity attached to the failure (last residual, condition
  /// estimate, smallest contraction constant found, ...).
  double value() const noexcept { return value_; }

 private:
  FailureKind kind_;
  double value_;
};

/// Raised when two operands live on different truncation windows.
class WindowMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace simop
