#pragma once

#include <stdexcept>
#include <string>

namespace omnivr {

enum class ErrorCode {
  kBehindViewport,
  kIndivisibleShape,
  kVerticalOutOfBounds,
  kEmptyOverlap,
  kOutOfPatch,
  kShapeMismatch,
  kLengthMismatch,
  kDisconnectedGraph,
  kMalformedStream,
  kTargetUnreachable,
  kInvalidArgument,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map failure classes to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBehindViewport: return "BehindViewport";
    case ErrorCode::kIndivisibleShape: return "IndivisibleShape";
    case ErrorCode::kVerticalOutOfBounds: return "VerticalOutOfBounds";
    case ErrorCode::kEmptyOverlap: return "EmptyOverlap";
    case ErrorCode::kOutOfPatch: return "OutOfPatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kMalformedStream: return "MalformedStream";
    case ErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace omnivr
