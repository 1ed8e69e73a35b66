#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evtrack {

enum class ErrorCode {
  MalformedRecord,
  CoordinateOutOfRange,
  NonMonotonicTimestamp,
  MissingHeader,
  InvalidParameter,
  EmptyCluster,
  DuplicateId,
  EmptyTree,
  DegenerateHeading,
  FrameAlignmentError,
  NoMatches,
  NoHeadings,
  NoGroundTruth,
  OverlapAtStart,
  PathOutOfBounds,
  DegenerateConfiguration,
  PointAtInfinity,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure is reported as an Error carrying the owning module
/// ("event_core", "dbscan", ...) and a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace evtrack
