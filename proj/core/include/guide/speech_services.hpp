#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guide/audio_io.hpp"

namespace guide {

struct RecognitionRequest {
  std::vector<uint8_t> payload;
  std::string language_tag = "en-us";
  std::string session_id;
};

struct Transcript {
  std::string text;
  std::optional<double> confidence;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// Audio encoding applied before upload. The recognizer only needs the
/// bytes to be deterministic; the default sends the WAV container as is.
struct CodecBoundary {
  std::string format_name;
  std::function<std::vector<uint8_t>(const PcmSignal&)> encode;

  static CodecBoundary wav_passthrough();
};

/// 64-bit FNV-1a of the payload, as 16 lowercase hex digits. The mock
/// recognizer keys its transcripts on this.
std::string fingerprint(std::span<const uint8_t> bytes);

class SpeechRecognizer {
 public:
  virtual ~SpeechRecognizer() = default;
  virtual Transcript recognize(const PcmSignal& signal) const = 0;
};

class SpeechSynthesizer {
 public:
  virtual ~SpeechSynthesizer() = default;
  virtual PcmSignal synthesize(std::string_view text) const = 0;
};

struct AsrClientOptions {
  std::string endpoint = "http://127.0.0.1:8080";
  std::string language_tag = "en-us";
  int retries = 3;
  std::chrono::milliseconds retry_delay{100};
  std::chrono::milliseconds timeout{2000};
  CodecBoundary codec = CodecBoundary::wav_passthrough();
};

/// Two-request recognition client: POST /recognize uploads the encoded
/// audio and returns a session id, then GET /result/<id> is polled until
/// the transcript is ready (200) or the retries run out (202 each time).
class AsrClient final : public SpeechRecognizer {
 public:
  explicit AsrClient(AsrClientOptions options);

  /// Throws Error(TransportError), Error(RecognitionPending),
  /// Error(RemoteRejection) or Error(UnknownSession).
  Transcript recognize(const PcmSignal& signal) const override;

  /// Exchange 1. Returns the session id.
  std::string upload(const RecognitionRequest& request) const;
  /// Exchange 2, polled with the configured retries.
  Transcript fetch_result(const std::string& session_id) const;

  const AsrClientOptions& options() const noexcept { return options_; }

 private:
  AsrClientOptions options_;
};

struct MockAsrOptions {
  /// GET /result answers 202 this many times per session before the
  /// transcript becomes available.
  int pending_polls = 0;
  /// When non-zero, every upload is answered with this status.
  int reject_status = 0;
};

/// In-process stand-in for the remote recognizer. Serves the same wire
/// protocol as the real service would, keyed on payload fingerprints.
/// Requests are handled one at a time.
class MockAsrServer {
 public:
  using TranscriptTable = std::map<std::string, std::string>;  // fingerprint -> text

  explicit MockAsrServer(TranscriptTable transcripts = {}, MockAsrOptions options = {});
  ~MockAsrServer();
  MockAsrServer(const MockAsrServer&) = delete;
  MockAsrServer& operator=(const MockAsrServer&) = delete;

  void prime(const std::string& fingerprint, std::string text);

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port. Throws Error(TransportError) if binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop() is called from elsewhere.
  void serve_blocking(const std::string& host, int port, const std::function<void(int)>& on_bound = {});
  void stop();
  bool running() const;

  /// "http://host:port" once started.
  std::string endpoint() const;

  /// "METHOD /path" for every request served, in arrival order.
  std::vector<std::string> request_log() const;

  // Protocol logic without the HTTP layer.
  std::string accept_upload(std::span<const uint8_t> payload, std::string_view language_tag);
  struct Lookup {
    int status;  // 200 ready, 202 pending
    Transcript transcript;
  };
  /// Throws Error(UnknownSession) for an id never issued.
  Lookup lookup_result(const std::string& session_id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Deterministic replacement for a real TTS voice: every byte b of the
/// UTF-8 text becomes a 100 ms sine at (200 + 2 b) Hz, amplitude 16384.
class ToneSynthesizer final : public SpeechSynthesizer {
 public:
  explicit ToneSynthesizer(uint32_t sample_rate_hz = 44100) : sample_rate_hz_(sample_rate_hz) {}
  PcmSignal synthesize(std::string_view text) const override;
  uint32_t sample_rate_hz() const noexcept { return sample_rate_hz_; }

 private:
  uint32_t sample_rate_hz_;
};

inline constexpr double kToneBaseHz = 200.0;
inline constexpr double kToneStepHz = 2.0;
inline constexpr double kToneAmplitude = 16384.0;

constexpr double tone_frequency_hz(uint8_t byte) noexcept { return kToneBaseHz + kToneStepHz * byte; }
constexpr std::size_t tone_segment_samples(uint32_t sample_rate_hz) noexcept { return sample_rate_hz / 10; }

PcmSignal synthesize(std::string_view text, uint32_t sample_rate_hz = 44100);

}  // namespace guide
