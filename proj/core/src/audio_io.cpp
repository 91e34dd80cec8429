#include "guide/audio_io.hpp"

#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "guide/errors.hpp"

namespace guide {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kBitsPerSample = 16;
constexpr std::size_t kCanonicalHeaderSize = 44;

uint16_t read_u16(std::span<const uint8_t> b, std::size_t at) {
  return static_cast<uint16_t>(b[at] | (b[at + 1] << 8));
}

uint32_t read_u32(std::span<const uint8_t> b, std::size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) | (static_cast<uint32_t>(b[at + 3]) << 24);
}

bool tag_equals(std::span<const uint8_t> b, std::size_t at, const char (&tag)[5]) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (b[at + i] != static_cast<uint8_t>(tag[i])) return false;
  }
  return true;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<uint8_t>((v >> shift) & 0xFF));
}

void put_tag(std::vector<uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedContainer, what); }
[[noreturn]] void unsupported(const std::string& what) { throw Error(ErrorCode::UnsupportedFormat, what); }

struct FormatChunk {
  uint32_t sample_rate_hz;
};

FormatChunk parse_format(std::span<const uint8_t> chunk) {
  if (chunk.size() < 16) malformed("fmt chunk shorter than 16 bytes");
  const uint16_t format_tag = read_u16(chunk, 0);
  const uint16_t channels = read_u16(chunk, 2);
  const uint32_t sample_rate = read_u32(chunk, 4);
  const uint32_t byte_rate = read_u32(chunk, 8);
  const uint16_t block_align = read_u16(chunk, 12);
  const uint16_t bits = read_u16(chunk, 14);

  if (format_tag != kFormatPcm) unsupported("format tag " + std::to_string(format_tag) + " is not PCM");
  if (channels != 1) unsupported(std::to_string(channels) + " channels; only mono is supported");
  if (bits != kBitsPerSample) unsupported(std::to_string(bits) + " bits per sample; only 16 is supported");
  if (sample_rate == 0) malformed("sample rate is zero");
  if (block_align != 2 || byte_rate != sample_rate * 2u) malformed("fmt byte rate / block align inconsistent");
  return FormatChunk{sample_rate};
}

}  // namespace

PcmSignal::PcmSignal(std::vector<int16_t> samples, uint32_t sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ == 0) unsupported("sample rate must be positive");
}

std::vector<double> PcmSignal::normalized() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (int16_t s : samples_) out.push_back(static_cast<double>(s) / 32768.0);
  return out;
}

PcmSignal parse_wav(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12) malformed("shorter than a RIFF header");
  if (!tag_equals(bytes, 0, "RIFF")) malformed("missing RIFF magic");
  if (!tag_equals(bytes, 8, "WAVE")) malformed("missing WAVE form type");

  const uint64_t riff_end = 8ull + read_u32(bytes, 4);
  if (riff_end > bytes.size()) malformed("RIFF size exceeds available bytes");
  if (riff_end < 12) malformed("RIFF size too small");

  std::optional<FormatChunk> format;
  std::size_t pos = 12;
  while (pos + 8 <= riff_end) {
    const uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + static_cast<uint64_t>(chunk_size) > riff_end) malformed("chunk overruns RIFF container");
    const auto payload = bytes.subspan(body, chunk_size);

    if (tag_equals(bytes, pos, "fmt ")) {
      if (format) malformed("duplicate fmt chunk");
      format = parse_format(payload);
    } else if (tag_equals(bytes, pos, "data")) {
      if (!format) malformed("data chunk precedes fmt chunk");
      if (chunk_size % 2 != 0) malformed("odd data chunk size for 16-bit samples");
      std::vector<int16_t> samples(chunk_size / 2);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<int16_t>(read_u16(payload, 2 * i));
      }
      return PcmSignal(std::move(samples), format->sample_rate_hz);
    }
    // RIFF chunks are word aligned.
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!format) malformed("no fmt chunk");
  malformed("no data chunk");
}

std::vector<uint8_t> write_wav(const PcmSignal& signal) {
  const auto data_bytes = static_cast<uint32_t>(signal.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(kCanonicalHeaderSize + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, signal.sample_rate_hz());
  put_u32(out, signal.sample_rate_hz() * 2);
  put_u16(out, 2);
  put_u16(out, kBitsPerSample);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (int16_t s : signal.samples()) put_u16(out, static_cast<uint16_t>(s));
  return out;
}

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PcmSignal read_wav_file(const std::filesystem::path& path) {
  return parse_wav(read_binary_file(path));
}

void write_wav_file(const std::filesystem::path& path, const PcmSignal& signal) {
  const auto bytes = write_wav(signal);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace guide
