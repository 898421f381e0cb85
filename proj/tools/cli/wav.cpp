#include "wav.hpp"

#include <algorithm>
#include <cmath>

#include "ssmgan/binary_io.hpp"
#include "ssmgan/error.hpp"

namespace ssmgan::cli {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

}  // namespace

std::int16_t quantize_sample(float v) {
  const double scaled = std::round(static_cast<double>(v) * 32767.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::vector<std::int16_t> quantize(std::span<const float> samples) {
  std::vector<std::int16_t> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(), quantize_sample);
  return out;
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples, std::uint32_t sample_rate, WavEncoding encoding) {
  const bool is_float = encoding == WavEncoding::kFloat32;
  const std::uint16_t bytes_per_sample = is_float ? 4 : 2;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * bytes_per_sample);

  io::ByteWriter w;
  w.str("RIFF");
  w.u32(36 + data_bytes);
  w.str("WAVE");
  w.str("fmt ");
  w.u32(16);
  w.u16(is_float ? kFormatFloat : kFormatPcm);
  w.u16(1);
  w.u32(sample_rate);
  w.u32(sample_rate * bytes_per_sample);
  w.u16(bytes_per_sample);
  w.u16(static_cast<std::uint16_t>(bytes_per_sample * 8));
  w.str("data");
  w.u32(data_bytes);
  for (float v : samples) {
    if (is_float) {
      w.f32(v);
    } else {
      w.u16(static_cast<std::uint16_t>(quantize_sample(v)));
    }
  }
  return w.take();
}

WavFile decode_wav(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "wav");
  if (r.str(4) != "RIFF") throw FormatError("wav: missing RIFF tag");
  const auto riff_size = r.u32();
  if (riff_size + 8ull != bytes.size()) throw FormatError("wav: RIFF size does not match file size");
  if (r.str(4) != "WAVE") throw FormatError("wav: missing WAVE tag");

  WavFile wav;
  bool have_fmt = false;
  std::uint16_t format = 0, bits = 0;
  while (r.remaining() > 0) {
    const auto id = r.str(4);
    const auto size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw FormatError("wav: fmt chunk too small");
      format = r.u16();
      if (r.u16() != 1) throw FormatError("wav: only mono files are supported");
      wav.sample_rate = r.u32();
      r.u32();
      r.u16();
      bits = r.u16();
      r.raw(size - 16);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (format == kFormatPcm && bits == 16) {
        wav.encoding = WavEncoding::kPcm16;
        if (size % 2) throw FormatError("wav: odd PCM16 payload");
        for (std::uint32_t i = 0; i < size / 2; ++i) wav.pcm16.push_back(static_cast<std::int16_t>(r.u16()));
      } else if (format == kFormatFloat && bits == 32) {
        wav.encoding = WavEncoding::kFloat32;
        if (size % 4) throw FormatError("wav: float payload not a multiple of 4 bytes");
        for (std::uint32_t i = 0; i < size / 4; ++i) wav.float32.push_back(r.f32());
      } else {
        throw FormatError("wav: unsupported sample format");
      }
      return wav;
    } else {
      r.raw(size + (size & 1));
    }
  }
  throw FormatError("wav: no data chunk");
}

void write_wav(const std::filesystem::path& path, std::span<const float> samples, std::uint32_t sample_rate,
               WavEncoding encoding) {
  io::write_file_atomic(path, encode_wav(samples, sample_rate, encoding));
}

WavFile read_wav(const std::filesystem::path& path) { return decode_wav(io::read_file(path)); }

}  // namespace ssmgan::cli
