#include "wavenhance/error.hpp"

namespace wavenhance {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kZeroFrames: return "zero frames";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kSignalTooShort: return "signal too short";
    case ErrorCode::kInconsistentLengths: return "inconsistent lengths";
    case ErrorCode::kDegenerateGains: return "degenerate gains";
    case ErrorCode::kEmptyReference: return "empty reference";
    case ErrorCode::kUnknownFixture: return "unknown fixture";
    case ErrorCode::kConfiguration: return "configuration error";
    case ErrorCode::kNetwork: return "network error";
    case ErrorCode::kHttpStatus: return "http status error";
    case ErrorCode::kMalformedResponse: return "malformed response";
    case ErrorCode::kTranscriberFailure: return "transcriber failure";
  }
  return "unknown error";
}

ExitClass exit_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
      return ExitClass::kUsage;
    case ErrorCode::kIo:
    case ErrorCode::kUnsupportedFormat:
    case ErrorCode::kZeroFrames:
      return ExitClass::kIo;
    case ErrorCode::kConfiguration:
    case ErrorCode::kNetwork:
    case ErrorCode::kHttpStatus:
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kTranscriberFailure:
    case ErrorCode::kUnknownFixture:
      return ExitClass::kExternalService;
    case ErrorCode::kEmptyInput:
    case ErrorCode::kSignalTooShort:
    case ErrorCode::kInconsistentLengths:
    case ErrorCode::kDegenerateGains:
    case ErrorCode::kEmptyReference:
      return ExitClass::kNumeric;
  }
  return ExitClass::kUsage;
}

}  // namespace wavenhance
