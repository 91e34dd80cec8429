#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace guide {

/// Mono PCM16 audio held in memory. Always one channel; the sample rate is
/// any positive integer (44100 Hz for the robot's microphone captures).
class PcmSignal {
 public:
  static constexpr int kChannelCount = 1;

  /// Throws Error(UnsupportedFormat) when sample_rate_hz is not positive.
  PcmSignal(std::vector<int16_t> samples, uint32_t sample_rate_hz);

  std::span<const int16_t> samples() const& noexcept { return samples_; }
  std::span<const int16_t> samples() const&& = delete;
  uint32_t sample_rate_hz() const noexcept { return sample_rate_hz_; }
  int channel_count() const noexcept { return kChannelCount; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration_seconds() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  /// Samples scaled to [-1, 1).
  std::vector<double> normalized() const;

  friend bool operator==(const PcmSignal&, const PcmSignal&) = default;

 private:
  std::vector<int16_t> samples_;
  uint32_t sample_rate_hz_;
};

/// Decodes a RIFF/WAVE PCM16 mono container. Unknown chunks are skipped by
/// their declared size; only the data chunk payload becomes samples.
/// Throws Error(MalformedContainer) or Error(UnsupportedFormat).
PcmSignal parse_wav(std::span<const uint8_t> bytes);

/// Encodes the canonical 44-byte-header PCM16 mono layout.
std::vector<uint8_t> write_wav(const PcmSignal& signal);

PcmSignal read_wav_file(const std::filesystem::path& path);
void write_wav_file(const std::filesystem::path& path, const PcmSignal& signal);

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace guide
