#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasehmm {

enum class ErrorKind {
  LengthMismatch,
  FpsMismatch,
  DimensionMismatch,
  OutOfRange,
  InvalidArgument,
  EmptyInput,
  EmptySequence,
  UnseenState,
  DegenerateCovariance,
  NoFeasiblePath,
  Io,
  Parse,
  NonContiguousFrames,
  RaggedRows,
  InvariantViolation,
  EmptyInputWithPositiveTarget,
  MissingPartner,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All library failures are reported through this one exception type; callers
// branch on kind() rather than on the dynamic type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace phasehmm
