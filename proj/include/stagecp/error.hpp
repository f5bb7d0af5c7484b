#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stagecp {

enum class ErrorKind {
  InvalidArgument,
  InsufficientData,
  WindowTooShort,
  RankDeficient,
  DimensionMismatch,
  TooFewStages,
  EmptyScores,
  LengthMismatch,
  AllZeroWeights,
  EmptyCalibration,
  InvalidLevel,
  InvalidMixingCoefficients,
  InvalidSpec,
  ConfigError,
  ParseError,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stagecp
