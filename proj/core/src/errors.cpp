#include "fujita/errors.hpp"

namespace fujita {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::AsymmetricWeight: return "AsymmetricWeight";
    case ErrorCode::NonpositiveWeightOrMeasure: return "NonpositiveWeightOrMeasure";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidFamily: return "InvalidFamily";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingNeighborValue: return "MissingNeighborValue";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::NonpositiveTestFunction: return "NonpositiveTestFunction";
    case ErrorCode::TruncationExhausted: return "TruncationExhausted";
    case ErrorCode::NegativeState: return "NegativeState";
    case ErrorCode::StepFloorWithoutGrowth: return "StepFloorWithoutGrowth";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RadiusBelowValidity: return "RadiusBelowValidity";
    case ErrorCode::MissingFit: return "MissingFit";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::StageFailure: return "StageFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

TruncationExhausted::TruncationExhausted(const std::string& what, double last_value,
                                         double previous_value, int last_radius)
    : Error(ErrorCode::TruncationExhausted, what),
      last_value_(last_value),
      previous_value_(previous_value),
      last_radius_(last_radius) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace fujita
