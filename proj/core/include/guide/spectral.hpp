#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "guide/audio_io.hpp"

namespace guide {

/// Closed frequency interval used when searching for the spectral peak.
struct FrequencyBand {
  double low_hz = 30.0;
  double high_hz = 3400.0;

  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

/// Recognizable range of the human voice; the default search band.
inline constexpr FrequencyBand kVoiceBand{30.0, 3400.0};

/// Magnitudes of the non-negative frequency bins below Nyquist.
class Spectrum {
 public:
  /// fft_size is 2 * magnitudes.size() and must be a power of two.
  /// Throws Error(InvalidBand) on negative magnitudes or a bad size.
  Spectrum(std::vector<double> magnitudes, double sample_rate_hz);

  std::span<const double> magnitudes() const& noexcept { return magnitudes_; }
  std::span<const double> magnitudes() const&& = delete;
  std::size_t fft_size() const noexcept { return 2 * magnitudes_.size(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double bin_width_hz() const noexcept { return sample_rate_hz_ / static_cast<double>(fft_size()); }
  double nyquist_hz() const noexcept { return sample_rate_hz_ / 2.0; }
  double bin_frequency_hz(std::size_t k) const noexcept { return static_cast<double>(k) * bin_width_hz(); }

 private:
  std::vector<double> magnitudes_;
  double sample_rate_hz_;
};

struct SpectralFeature {
  double peak_frequency_hz = 0.0;
  double peak_magnitude = 0.0;
  FrequencyBand band;
};

std::size_t next_power_of_two(std::size_t n) noexcept;

/// Radix-2 decimation-in-time Cooley-Tukey transform. The input is
/// zero-padded to the next power of two; all fft_size bins are returned.
/// Throws Error(EmptySignal) on empty input.
std::vector<std::complex<double>> fft_complex(std::span<const double> samples);

/// Whole-recording spectrum of a signal: one rectangular frame, raw sample
/// values (no normalization), bins [0, fft_size / 2).
Spectrum fft(const PcmSignal& signal);

/// Bin-centre frequency of the largest magnitude inside the band. Ties go
/// to the lowest frequency.
/// Throws Error(InvalidBand) unless 0 <= low < high <= Nyquist, and
/// Error(EmptyBand) when no bin centre falls inside the band.
SpectralFeature extract_peak(const Spectrum& spectrum, FrequencyBand band = kVoiceBand);

/// fft followed by extract_peak.
SpectralFeature peak_feature(const PcmSignal& signal, FrequencyBand band = kVoiceBand);

}  // namespace guide
