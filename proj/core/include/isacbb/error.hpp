#pragma once

#include <stdexcept>
#include <string>

namespace isacbb {

enum class ErrorCode {
  kInvalidArgument,
  kNotPsd,
  kSingularCovariance,
  kChannelsNotOrthogonal,
  kZeroBeamGain,
  kInfeasibleBox,
  kRootNotBracketed,
  kNonConvergence,
  kNumericalFailure,
  kShapeMismatch,
  kIo,
};

const char* to_string(ErrorCode code);

// Exit status used by the command-line tool: 2 for bad or degenerate input,
// 3 for numerical failures.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace isacbb
