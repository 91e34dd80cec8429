#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guide/audio_io.hpp"
#include "guide/spectral.hpp"

namespace guide {

enum class GenderLabel { Female, Male };

std::string_view to_string(GenderLabel label) noexcept;

/// Accepts "female"/"male" (or "f"/"m"), case-insensitive.
std::optional<GenderLabel> parse_gender_label(std::string_view text);

/// One-dimensional threshold classifier over the spectral peak frequency.
///
/// The threshold is the midpoint of the two class means of the training
/// peaks. The peaks are kept so the model can be audited and re-derived;
/// the invariant threshold == (mean(male) + mean(female)) / 2 always holds.
class GenderModel {
 public:
  /// Throws Error(EmptyClass) when either list is empty.
  static GenderModel from_peaks(std::vector<double> male_peaks_hz, std::vector<double> female_peaks_hz,
                                FrequencyBand band = kVoiceBand);

  double threshold_hz() const noexcept { return threshold_hz_; }
  /// Threshold rounded to the nearest whole hertz, for display.
  long display_threshold_hz() const noexcept;
  std::span<const double> male_peaks_hz() const noexcept { return male_peaks_hz_; }
  std::span<const double> female_peaks_hz() const noexcept { return female_peaks_hz_; }
  const FrequencyBand& band() const noexcept { return band_; }

  double male_mean_hz() const noexcept;
  double female_mean_hz() const noexcept;

  /// Human-readable warnings for degenerate training sets: equal class
  /// means, inverted means, or overlapping class ranges. Empty when clean.
  std::vector<std::string> warnings() const;

  friend bool operator==(const GenderModel&, const GenderModel&) = default;

 private:
  GenderModel(std::vector<double> male, std::vector<double> female, FrequencyBand band);

  double threshold_hz_ = 0.0;
  std::vector<double> male_peaks_hz_;
  std::vector<double> female_peaks_hz_;
  FrequencyBand band_;
};

/// Extracts the peak frequency of every sample and fits the threshold.
GenderModel train(std::span<const PcmSignal> male_samples, std::span<const PcmSignal> female_samples,
                  FrequencyBand band = kVoiceBand);

GenderModel train_from_peaks(std::span<const double> male_peaks_hz, std::span<const double> female_peaks_hz,
                             FrequencyBand band = kVoiceBand);

/// Female iff the peak is strictly higher than the threshold.
GenderLabel classify(const GenderModel& model, const SpectralFeature& feature) noexcept;
GenderLabel classify_frequency(const GenderModel& model, double peak_frequency_hz) noexcept;

struct LabeledFeature {
  SpectralFeature feature;
  GenderLabel expected;
};

struct EvaluationOutcome {
  GenderLabel expected;
  GenderLabel predicted;
  bool correct() const noexcept { return expected == predicted; }
};

struct EvaluationReport {
  std::vector<EvaluationOutcome> per_sample;
  double accuracy_percent = 0.0;

  std::size_t correct() const noexcept;
  std::size_t total() const noexcept { return per_sample.size(); }
};

/// accuracy = 100 * correctly recognized / expected.
/// Throws Error(EmptyClass) when there is nothing to evaluate.
EvaluationReport evaluate(const GenderModel& model, std::span<const LabeledFeature> labeled);

/// Line-oriented `key = value` text; see load_model for the accepted keys.
std::string save_model(const GenderModel& model);

/// Keys: threshold_hz, band_low_hz, band_high_hz, male_peaks_hz,
/// female_peaks_hz (comma separated). Every key is required exactly once,
/// unknown keys are rejected, blank lines and `#` comments are ignored.
/// Throws Error(MalformedModelFile), including when the stored threshold
/// disagrees with the stored peaks.
GenderModel load_model(std::string_view text);

GenderModel load_model_file(const std::filesystem::path& path);
void save_model_file(const std::filesystem::path& path, const GenderModel& model);

}  // namespace guide
