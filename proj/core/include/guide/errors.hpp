#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace guide {

enum class ErrorCode {
  // audio_io
  MalformedContainer,
  UnsupportedFormat,
  // spectral
  EmptySignal,
  InvalidBand,
  EmptyBand,
  // gender_id
  EmptyClass,
  MalformedModelFile,
  // qa_responder
  MalformedRuleFile,
  // speech_services
  TransportError,
  RecognitionPending,
  RemoteRejection,
  UnknownSession,
  // configuration and file access
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base for every error raised by the library. The code identifies the
/// failure independently of the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 protected:
  struct Preformatted {};
  Error(Preformatted, ErrorCode code, const std::string& full_message);

 private:
  ErrorCode code_;
};

}  // namespace guide
