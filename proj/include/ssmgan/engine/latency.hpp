#pragma once

#include <cstddef>

#include "ssmgan/dsp/pqmf.hpp"
#include "ssmgan/model/generator.hpp"

namespace ssmgan::engine {

// Upstream packet extraction delay. Reported, not incurred by the decoder.
inline constexpr double kEncoderDelayMs = 45.0;

struct LatencyReport {
  double encoder_ms = kEncoderDelayMs;
  double network_ms = 0.0;  // every conv is causal
  double pqmf_ms = 0.0;
  std::size_t pqmf_declared_samples = 0;
  std::size_t pqmf_measured_samples = 0;

  double total_ms() const { return encoder_ms + network_ms + pqmf_ms; }
};

// Position of the peak of the analysis->synthesis impulse response.
std::size_t measure_cascade_delay(const dsp::PqmfBank& bank);

LatencyReport latency_report(const model::Generator& generator);

}  // namespace ssmgan::engine
