#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ssmgan::cli {

enum class WavEncoding { kPcm16, kFloat32 };

struct WavFile {
  std::uint32_t sample_rate = 16000;
  WavEncoding encoding = WavEncoding::kPcm16;
  std::vector<std::int16_t> pcm16;  // kPcm16 payload
  std::vector<float> float32;       // kFloat32 payload
  std::size_t frames() const { return encoding == WavEncoding::kPcm16 ? pcm16.size() : float32.size(); }
};

// Scales by 32767, rounds half away from zero and clips to int16.
std::int16_t quantize_sample(float v);
std::vector<std::int16_t> quantize(std::span<const float> samples);

// Mono RIFF/WAVE, 44-byte canonical header.
std::vector<std::uint8_t> encode_wav(std::span<const float> samples, std::uint32_t sample_rate, WavEncoding encoding);
WavFile decode_wav(std::span<const std::uint8_t> bytes);

void write_wav(const std::filesystem::path& path, std::span<const float> samples, std::uint32_t sample_rate,
               WavEncoding encoding = WavEncoding::kPcm16);
WavFile read_wav(const std::filesystem::path& path);

}  // namespace ssmgan::cli
