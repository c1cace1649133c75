#include "commonlines/error.hpp"

namespace commonlines {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NotIsometric: return "NotIsometric";
    case ErrorCode::TriangleInequalityViolated: return "TriangleInequalityViolated";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NormMismatch: return "NormMismatch";
    case ErrorCode::CoincidentPlanes: return "CoincidentPlanes";
    case ErrorCode::NotGeneric: return "NotGeneric";
    case ErrorCode::DegenerateAngle: return "DegenerateAngle";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::IncompatibleTriples: return "IncompatibleTriples";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::UndefinedProjection: return "UndefinedProjection";
    case ErrorCode::InitializationFailed: return "InitializationFailed";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace commonlines
