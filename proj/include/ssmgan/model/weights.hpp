#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ssmgan/model/config.hpp"

namespace ssmgan::model {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  std::size_t size() const { return data.size(); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Name, shape and owning module of one tensor the generator graph needs.
struct TensorSpec {
  std::string name;
  std::vector<std::size_t> shape;
  std::string module;
};

// Every tensor required by `config`, in graph order. Conv weights are
// [out][in][K], biases [out].
std::vector<TensorSpec> required_tensors(const GeneratorConfig& config);

// Upsampler placement: entry i is true when block i is preceded by an
// upsampling layer (its rate exceeds the previous stage's).
std::vector<bool> upsampler_plan(const GeneratorConfig& config);

class WeightStore {
 public:
  WeightStore() = default;
  explicit WeightStore(GeneratorConfig config) : config_(std::move(config)) {}

  const GeneratorConfig& config() const { return config_; }
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  bool empty() const { return tensors_.empty(); }

  void set(const std::string& name, Tensor tensor);
  bool contains(const std::string& name) const { return tensors_.contains(name); }
  // Throws ValidationError naming the tensor when it is missing or mis-shaped.
  const Tensor& require(const std::string& name, std::span<const std::size_t> shape) const;

  // Checks the store against required_tensors(config()): every tensor present
  // with its exact shape and nothing extra.
  void validate() const;

  std::size_t parameter_count() const;
  // FNV-1a over the config text and all tensors in name order.
  std::uint64_t fingerprint() const;

 private:
  GeneratorConfig config_;
  std::map<std::string, Tensor> tensors_;
};

// Scaled-uniform initialization, U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for conv
// weights and biases, U(-1, 1) for the pitch embedding. Bit-identical for the
// same seed.
WeightStore random_weights(const GeneratorConfig& config, std::uint64_t seed);
WeightStore zero_weights(const GeneratorConfig& config);

// Weight container: "SMGW", u16 version, config text, u64 fingerprint, a
// manifest of (name, rank, dims, byte offset) and a blob of little-endian
// float32 data, each tensor 4-byte aligned at its manifest offset.
std::vector<std::uint8_t> serialize_weights(const WeightStore& store);
WeightStore deserialize_weights(std::span<const std::uint8_t> bytes);
WeightStore load_weights(const std::filesystem::path& path);
void save_weights(const std::filesystem::path& path, const WeightStore& store);

}  // namespace ssmgan::model
