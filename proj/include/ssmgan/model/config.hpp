#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ssmgan/dsp/pqmf.hpp"

namespace ssmgan::model {

// Architecture hyperparameters. Defaults are the published configuration:
// L = 64, K = 9, F = 80, nine residual blocks at 100 ... 4000 Hz, 4 bands,
// 16 kHz output, 10 ms frames.
struct GeneratorConfig {
  std::size_t hidden_channels = 64;  // L
  std::size_t kernel_size = 9;       // K
  std::size_t cond_channels = 80;    // F
  std::vector<std::uint32_t> rate_schedule{100, 200, 500, 1000, 2000, 4000, 4000, 4000, 4000};
  std::size_t bands = 4;  // N
  std::uint32_t sample_rate = 16000;
  std::uint32_t frame_ms = 10;
  std::size_t pitch_vocab = 64;
  std::size_t prior_channels = 64;
  std::size_t cepstrum_dim = 18;
  std::size_t cond_head_kernel = 3;
  std::size_t pqmf_taps = dsp::kDefaultPqmfTaps;
  double pqmf_beta = dsp::kDefaultPqmfBeta;
  double pqmf_cutoff = dsp::kDefaultPqmfCutoff;

  // Throws ValidationError.
  void validate() const;

  std::uint32_t frame_rate() const { return 1000 / frame_ms; }
  std::size_t frame_samples() const { return sample_rate * frame_ms / 1000; }
  std::uint32_t band_rate() const { return sample_rate / static_cast<std::uint32_t>(bands); }
  // Rows per frame for a layer running at `rate` Hz.
  std::size_t rows_per_frame(std::uint32_t rate) const { return rate * frame_ms / 1000; }

  // Human-readable `key = value` document, one key per line.
  std::string to_text() const;
  static GeneratorConfig from_text(std::string_view text);
  std::uint64_t fingerprint() const;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

struct Ratio {
  std::uint32_t up = 1;
  std::uint32_t down = 1;
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

Ratio reduced_ratio(std::uint32_t to_rate, std::uint32_t from_rate);

}  // namespace ssmgan::model
