#include "guide/config.hpp"

#include <cstdlib>
#include <set>

#include "guide/errors.hpp"
#include "text_util.hpp"

namespace guide {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

double to_double(const std::string& key, std::string_view value) {
  const auto v = detail::parse_double(value);
  if (!v) invalid(key + " is not a number: '" + std::string(value) + "'");
  return *v;
}

long long to_integer(const std::string& key, std::string_view value) {
  const auto v = detail::parse_integer(value);
  if (!v) invalid(key + " is not an integer: '" + std::string(value) + "'");
  return *v;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz)) invalid("band_low_hz must be below band_high_hz");
  if (sample_rate_hz == 0) invalid("sample_rate_hz must be positive");
  if (asr_retries < 0) invalid("asr.retries must be non-negative");
  if (asr_retry_delay.count() < 0) invalid("asr.retry_delay_ms must be non-negative");
  if (asr_endpoint.empty()) invalid("asr.endpoint is empty");
  if (language_tag.empty()) invalid("asr.language is empty");
}

std::optional<std::string> process_env(std::string_view name) {
  const char* value = std::getenv(std::string(name).c_str());
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

PipelineConfig apply_config_text(PipelineConfig config, std::string_view text) {
  const auto parsed = detail::parse_key_values(text);
  if (parsed.bad_line) invalid("config line " + std::to_string(*parsed.bad_line) + " is not 'key = value'");
  std::set<std::string> seen;
  for (const auto& [line, key, value] : parsed.entries) {
    if (!seen.insert(key).second) invalid("duplicate config key '" + key + "'");
    if (key == "band_low_hz") {
      config.band.low_hz = to_double(key, value);
    } else if (key == "band_high_hz") {
      config.band.high_hz = to_double(key, value);
    } else if (key == "model_path") {
      config.model_path = value;
    } else if (key == "rules_path") {
      config.rules_path = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    } else if (key == "sample_rate_hz") {
      const auto rate = to_integer(key, value);
      if (rate <= 0 || rate > 0xFFFFFFFFll) invalid("sample_rate_hz out of range");
      config.sample_rate_hz = static_cast<uint32_t>(rate);
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "asr.endpoint") {
      config.asr_endpoint = value;
    } else if (key == "asr.language") {
      config.language_tag = value;
    } else if (key == "asr.retries") {
      config.asr_retries = static_cast<int>(to_integer(key, value));
    } else if (key == "asr.retry_delay_ms") {
      config.asr_retry_delay = std::chrono::milliseconds(to_integer(key, value));
    } else {
      invalid("unknown config key '" + key + "' on line " + std::to_string(line));
    }
  }
  return config;
}

PipelineConfig resolve_config(const std::optional<std::filesystem::path>& config_file, const ConfigOverrides& flags,
                              const EnvLookup& env) {
  PipelineConfig config;
  if (config_file) config = apply_config_text(config, detail::read_text_file(*config_file));

  if (env) {
    if (auto endpoint = env(kAsrEndpointEnv)) config.asr_endpoint = *endpoint;
  }

  if (flags.band_low_hz) config.band.low_hz = *flags.band_low_hz;
  if (flags.band_high_hz) config.band.high_hz = *flags.band_high_hz;
  if (flags.model_path) config.model_path = *flags.model_path;
  if (flags.asr_endpoint) config.asr_endpoint = *flags.asr_endpoint;
  if (flags.language_tag) config.language_tag = *flags.language_tag;
  if (flags.asr_retries) config.asr_retries = *flags.asr_retries;
  if (flags.asr_retry_delay_ms) config.asr_retry_delay = std::chrono::milliseconds(*flags.asr_retry_delay_ms);
  if (flags.rules_path) config.rules_path = *flags.rules_path;
  if (flags.sample_rate_hz) config.sample_rate_hz = *flags.sample_rate_hz;
  if (flags.output_dir) config.output_dir = *flags.output_dir;

  config.validate();
  return config;
}

}  // namespace guide
