#include "guide/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "guide/errors.hpp"

namespace guide {

namespace {

void bit_reverse_permute(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
}

// In place. Each stage combines the DFT of the even-indexed half with the
// twiddled DFT of the odd-indexed half: X_k = E_k + w^k O_k and
// X_{k+len/2} = E_k - w^k O_k.
void transform_in_place(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (n < 2) return;
  bit_reverse_permute(data);

  // Twiddles computed directly rather than by repeated multiplication so
  // the error stays at a few ulps for large n.
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(angle), std::sin(angle)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto even = data[start + k];
        const auto odd = twiddle[k * stride] * data[start + k + half];
        data[start + k] = even + odd;
        data[start + k + half] = even - odd;
      }
    }
  }
}

}  // namespace

Spectrum::Spectrum(std::vector<double> magnitudes, double sample_rate_hz)
    : magnitudes_(std::move(magnitudes)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz_ > 0.0)) throw Error(ErrorCode::InvalidBand, "spectrum sample rate must be positive");
  const std::size_t size = fft_size();
  if (size == 0 || (size & (size - 1)) != 0) {
    throw Error(ErrorCode::InvalidBand, "spectrum fft size must be a power of two");
  }
  for (double m : magnitudes_) {
    if (!(m >= 0.0)) throw Error(ErrorCode::InvalidBand, "spectrum magnitudes must be non-negative");
  }
}

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> fft_complex(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySignal, "cannot transform an empty signal");
  std::vector<std::complex<double>> data(next_power_of_two(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) data[i] = samples[i];
  transform_in_place(data);
  return data;
}

Spectrum fft(const PcmSignal& signal) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "cannot transform an empty signal");
  // Padded to at least two points so a one-sample signal keeps its DC bin.
  std::vector<double> real(std::max<std::size_t>(signal.size(), 2), 0.0);
  std::copy(signal.samples().begin(), signal.samples().end(), real.begin());
  const auto bins = fft_complex(real);

  std::vector<double> magnitudes(bins.size() / 2);
  for (std::size_t k = 0; k < magnitudes.size(); ++k) magnitudes[k] = std::abs(bins[k]);
  return Spectrum(std::move(magnitudes), signal.sample_rate_hz());
}

SpectralFeature extract_peak(const Spectrum& spectrum, FrequencyBand band) {
  if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz && band.high_hz <= spectrum.nyquist_hz())) {
    std::ostringstream msg;
    msg << "band [" << band.low_hz << ", " << band.high_hz << "] Hz outside [0, " << spectrum.nyquist_hz() << "] Hz";
    throw Error(ErrorCode::InvalidBand, msg.str());
  }

  const auto mags = spectrum.magnitudes();
  auto first = static_cast<std::size_t>(std::ceil(band.low_hz / spectrum.bin_width_hz()));
  while (first > 0 && spectrum.bin_frequency_hz(first - 1) >= band.low_hz) --first;
  while (first < mags.size() && spectrum.bin_frequency_hz(first) < band.low_hz) ++first;

  std::size_t best = mags.size();
  for (std::size_t k = first; k < mags.size() && spectrum.bin_frequency_hz(k) <= band.high_hz; ++k) {
    if (best == mags.size() || mags[k] > mags[best]) best = k;
  }
  if (best == mags.size()) throw Error(ErrorCode::EmptyBand, "no frequency bin inside the band");

  return SpectralFeature{spectrum.bin_frequency_hz(best), mags[best], band};
}

SpectralFeature peak_feature(const PcmSignal& signal, FrequencyBand band) {
  return extract_peak(fft(signal), band);
}

}  // namespace guide
