#include "mepsim/error.hpp"

namespace mepsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidTopology: return "invalid-topology";
    case ErrorKind::kConnectivity: return "connectivity";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kInconsistentOverride: return "inconsistent-override";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kScheduleUnderrun: return "schedule-underrun";
    case ErrorKind::kInsufficientHorizon: return "insufficient-horizon";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mepsim
