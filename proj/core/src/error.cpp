#include "fsat/error.hpp"

namespace fsat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonUnitary: return "NonUnitary";
    case ErrorKind::DecompositionFailed: return "DecompositionFailed";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidSpin: return "InvalidSpin";
    case ErrorKind::SymmetryBroken: return "SymmetryBroken";
    case ErrorKind::DimensionUnexpected: return "DimensionUnexpected";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::InsufficientDecay: return "InsufficientDecay";
    case ErrorKind::FitDiverged: return "FitDiverged";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fsat
