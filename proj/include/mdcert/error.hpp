#pragma once

#include <stdexcept>
#include <string>

namespace mdcert {

// Error categories surfaced through the C API as status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kDegenerate = 2,
  kWindowViolation = 3,
  kCheckFailed = 4,
  kHypothesisFailed = 5,
  kInsufficientSamples = 6,
  kNotAnchored = 7,
  kSearchCap = 8,
  kUnsupported = 9,
  kIo = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mdcert
