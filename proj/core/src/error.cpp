#include "evtrack/error.hpp"

namespace evtrack {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyTree: return "EmptyTree";
    case ErrorCode::DegenerateHeading: return "DegenerateHeading";
    case ErrorCode::FrameAlignmentError: return "FrameAlignmentError";
    case ErrorCode::NoMatches: return "NoMatches";
    case ErrorCode::NoHeadings: return "NoHeadings";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::OverlapAtStart: return "OverlapAtStart";
    case ErrorCode::PathOutOfBounds: return "PathOutOfBounds";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string module, const std::string& detail)
    : std::runtime_error("[" + module + "] " + std::string(to_string(code)) +
                         (detail.empty() ? std::string() : ": " + detail)),
      code_(code),
      module_(std::move(module)) {}

}  // namespace evtrack
