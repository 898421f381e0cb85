#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssmgan/model/config.hpp"
#include "ssmgan/model/generator.hpp"
#include "ssmgan/model/weights.hpp"

namespace ssmgan::model {

struct LayerMacs {
  std::string name;
  std::uint64_t rate = 0;             // output samples per second
  std::uint64_t macs_per_sample = 0;  // per output sample
  std::uint64_t macs_per_second = 0;
};

struct MacReport {
  std::vector<LayerMacs> layers;
  std::uint64_t total = 0;  // MAC/s
};

// Per-sample cost of one residual block in the closed-form model:
// (F + 5L) * L * K, activations and lower-order terms ignored.
constexpr std::uint64_t resblock_macs_per_sample(std::uint64_t F, std::uint64_t L, std::uint64_t K) {
  return (F + 5 * L) * L * K;
}
constexpr std::uint64_t upsampler_macs_per_sample(std::uint64_t L, std::uint64_t K) { return L * L * K; }

// Closed-form complexity: every block at its rate plus every upsampler at its
// output rate. Exact integer arithmetic.
MacReport mac_count(const GeneratorConfig& config);

// Multiply-accumulates actually performed by the built graph's convolutions
// (including the conditioning head, the output conv and the PQMF synthesis).
MacReport structural_mac_count(const Generator& generator);

struct ModuleParams {
  std::string module;
  std::uint64_t count = 0;
};

struct ParamReport {
  std::vector<ModuleParams> modules;  // graph order
  std::uint64_t total = 0;
};

// Counts stored scalars of `weights`, grouped by owning module.
ParamReport param_count(const WeightStore& weights);

}  // namespace ssmgan::model
