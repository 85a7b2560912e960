#include "phasehmm/error.hpp"

namespace phasehmm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::FpsMismatch: return "FpsMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::UnseenState: return "UnseenState";
    case ErrorKind::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorKind::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::NonContiguousFrames: return "NonContiguousFrames";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::EmptyInputWithPositiveTarget: return "EmptyInputWithPositiveTarget";
    case ErrorKind::MissingPartner: return "MissingPartner";
  }
  return "Unknown";
}

}  // namespace phasehmm
