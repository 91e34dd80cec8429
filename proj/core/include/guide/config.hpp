#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "guide/spectral.hpp"

namespace guide {

struct PipelineConfig {
  FrequencyBand band = kVoiceBand;
  std::filesystem::path model_path;  // empty: no gender identification
  std::string asr_endpoint = "http://127.0.0.1:8080";
  std::string language_tag = "en-us";
  int asr_retries = 3;
  std::chrono::milliseconds asr_retry_delay{100};
  std::optional<std::filesystem::path> rules_path;
  uint32_t sample_rate_hz = 44100;
  std::filesystem::path output_dir;  // empty: speech is not written to disk

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// Values given on the command line; unset fields fall through.
struct ConfigOverrides {
  std::optional<double> band_low_hz;
  std::optional<double> band_high_hz;
  std::optional<std::filesystem::path> model_path;
  std::optional<std::string> asr_endpoint;
  std::optional<std::string> language_tag;
  std::optional<int> asr_retries;
  std::optional<int> asr_retry_delay_ms;
  std::optional<std::filesystem::path> rules_path;
  std::optional<uint32_t> sample_rate_hz;
  std::optional<std::filesystem::path> output_dir;
};

inline constexpr const char* kAsrEndpointEnv = "GUIDE_ASR_ENDPOINT";

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Reads the process environment.
std::optional<std::string> process_env(std::string_view name);

/// Applies a `key = value` config file on top of base. Keys: band_low_hz,
/// band_high_hz, model_path, rules_path, sample_rate_hz, output_dir,
/// asr.endpoint, asr.language, asr.retries, asr.retry_delay_ms.
/// Throws Error(InvalidConfig) on unknown keys or bad values.
PipelineConfig apply_config_text(PipelineConfig base, std::string_view text);

/// Precedence: command-line flag > environment > config file > default.
PipelineConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                              const ConfigOverrides& flags, const EnvLookup& env = process_env);

}  // namespace guide
