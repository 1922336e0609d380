#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fsat {

enum class ErrorKind {
  NonUnitary,
  DecompositionFailed,
  DimensionMismatch,
  InvalidSpin,
  SymmetryBroken,
  DimensionUnexpected,
  NotNormalized,
  IndexOutOfRange,
  WindowOutOfRange,
  InsufficientDecay,
  FitDiverged,
  InsufficientPoints,
  GridMismatch,
  ParseError,
  SemanticError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so that callers (and the
// CLI's machine-readable error line) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fsat
