#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mepsim {

enum class ErrorKind {
  kInvalidTopology,
  kConnectivity,
  kValidation,
  kInconsistentOverride,
  kParameter,
  kScheduleUnderrun,
  kInsufficientHorizon,
  kConfiguration,
  kParse,
  kIo,
};

/// Short stable identifier, used in machine-parsable CLI error lines.
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mepsim
