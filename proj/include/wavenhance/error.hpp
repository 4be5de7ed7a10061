#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavenhance {

// Every failure raised by the library carries one of these codes. The CLI maps
// them onto its exit-status classes via exit_class().
enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kIo,
  kUnsupportedFormat,
  kZeroFrames,
  kEmptyInput,
  kSignalTooShort,
  kInconsistentLengths,
  kDegenerateGains,
  kEmptyReference,
  kUnknownFixture,
  kConfiguration,
  kNetwork,
  kHttpStatus,
  kMalformedResponse,
  kTranscriberFailure,
};

enum class ExitClass : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kExternalService = 3,
  kNumeric = 4,
};

std::string_view to_string(ErrorCode code);
ExitClass exit_class(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wavenhance
