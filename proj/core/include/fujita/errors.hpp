#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fujita {

enum class ErrorCode {
  // graph construction and queries
  DuplicateEdge,
  AsymmetricWeight,
  NonpositiveWeightOrMeasure,
  SelfLoop,
  Disconnected,
  BudgetExceeded,
  InvalidFamily,
  UnknownVertex,
  TruncationTooSmall,
  ParseError,
  // operators
  MissingNeighborValue,
  EmptyInterior,
  NonpositiveTestFunction,
  // heat kernel
  TruncationExhausted,
  // semilinear solver
  NegativeState,
  StepFloorWithoutGrowth,
  NoConvergence,
  // analysis
  RadiusBelowValidity,
  MissingFit,
  DegenerateFit,
  // shared
  InvalidArgument,
  // runner
  ConfigParse,
  StageFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// The exhaustion p_r -> p did not settle inside the stored truncation.
/// Carries the last two members of the radius-doubling sequence so callers
/// can still use the (one-sided) bracket.
class TruncationExhausted : public Error {
 public:
  TruncationExhausted(const std::string& what, double last_value,
                      double previous_value, int last_radius);

  double last_value() const noexcept { return last_value_; }
  double previous_value() const noexcept { return previous_value_; }
  int last_radius() const noexcept { return last_radius_; }

 private:
  double last_value_;
  double previous_value_;
  int last_radius_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace fujita
