#include "entevolve/error.hpp"

namespace entevolve {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::VarianceMismatch: return "variance-mismatch";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::DanglingEdge: return "dangling-edge";
    case ErrorCode::DuplicateLeg: return "duplicate-leg";
    case ErrorCode::OpenLegMismatch: return "open-leg-mismatch";
    case ErrorCode::IncompletePlan: return "incomplete-plan";
    case ErrorCode::GraphTooLarge: return "graph-too-large";
    case ErrorCode::LegNotOpen: return "leg-not-open";
    case ErrorCode::NotStateLike: return "not-state-like";
    case ErrorCode::ZeroState: return "zero-state";
    case ErrorCode::NonSquare: return "non-square";
    case ErrorCode::NotHermitian: return "not-hermitian";
    case ErrorCode::NotPositive: return "not-positive";
    case ErrorCode::NotNormalized: return "not-normalized";
    case ErrorCode::RankTooLarge: return "rank-too-large";
    case ErrorCode::UnsupportedMode: return "unsupported-mode";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Format: return "format";
  }
  return "unknown";
}

}  // namespace entevolve
