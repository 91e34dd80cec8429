#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "guide/audio_io.hpp"

namespace guide::testing {

// Peak frequencies measured on the ten training speakers (Hz).
inline const std::vector<double> kTrainingMale{512, 698, 497, 506, 628};
inline const std::vector<double> kTrainingFemale{623, 676, 628, 576, 639};

inline PcmSignal make_tone(double frequency_hz, double seconds = 1.0, uint32_t rate = 44100,
                           double amplitude = 16000.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<int16_t> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = static_cast<int16_t>(
        std::lround(amplitude * std::sin(2.0 * std::numbers::pi * frequency_hz * static_cast<double>(i) / rate)));
  }
  return PcmSignal(std::move(samples), rate);
}

inline PcmSignal random_signal(std::mt19937_64& rng, std::size_t length, uint32_t rate) {
  std::uniform_int_distribution<int> dist(-32768, 32767);
  std::vector<int16_t> samples(length);
  for (auto& s : samples) s = static_cast<int16_t>(dist(rng));
  return PcmSignal(std::move(samples), rate);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("guide-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace guide::testing
