#include "guide/errors.hpp"

namespace guide {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::MalformedModelFile: return "MalformedModelFile";
    case ErrorCode::MalformedRuleFile: return "MalformedRuleFile";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::RecognitionPending: return "RecognitionPending";
    case ErrorCode::RemoteRejection: return "RemoteRejection";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(Preformatted, ErrorCode code, const std::string& full_message)
    : std::runtime_error(full_message), code_(code) {}

}  // namespace guide
