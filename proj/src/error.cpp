#include "glide/error.hpp"

namespace glide {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorKind::InfeasibleEdgeCount: return "InfeasibleEdgeCount";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateCategory: return "DegenerateCategory";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EnvironmentTooSmall: return "EnvironmentTooSmall";
    case ErrorKind::CandidateExplosion: return "CandidateExplosion";
    case ErrorKind::NodeSetMismatch: return "NodeSetMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace glide
