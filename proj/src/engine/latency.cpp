#include "ssmgan/engine/latency.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ssmgan::engine {

std::size_t measure_cascade_delay(const dsp::PqmfBank& bank) {
  const std::size_t N = bank.bands();
  const std::size_t span = 4 * bank.length();
  const std::size_t len = (span + N - 1) / N * N;
  std::vector<float> impulse(len, 0.0f);
  impulse[0] = 1.0f;
  const auto out = dsp::pqmf_synthesis_offline(dsp::pqmf_analysis(impulse, bank), bank);
  const auto peak =
      std::max_element(out.begin(), out.end(), [](float a, float b) { return std::abs(a) < std::abs(b); });
  return static_cast<std::size_t>(peak - out.begin());
}

LatencyReport latency_report(const model::Generator& generator) {
  const auto& bank = generator.pqmf();
  LatencyReport r;
  r.pqmf_declared_samples = bank.declared_delay();
  r.pqmf_measured_samples = measure_cascade_delay(bank);
  r.pqmf_ms = 1000.0 * static_cast<double>(r.pqmf_declared_samples) / generator.config().sample_rate;
  return r;
}

}  // namespace ssmgan::engine
