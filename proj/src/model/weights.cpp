#include "ssmgan/model/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssmgan/binary_io.hpp"
#include "ssmgan/error.hpp"
#include "ssmgan/random.hpp"

namespace ssmgan::model {
namespace {

constexpr std::array<char, 4> kWeightMagic{'S', 'M', 'G', 'W'};
constexpr std::uint16_t kWeightVersion = 1;

std::string shape_string(std::span<const std::size_t> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

std::size_t element_count(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void add_conv(std::vector<TensorSpec>& out, const std::string& prefix, const std::string& module, std::size_t in,
              std::size_t outc, std::size_t k) {
  out.push_back({prefix + ".weight", {outc, in, k}, module});
  out.push_back({prefix + ".bias", {outc}, module});
}

}  // namespace

std::vector<bool> upsampler_plan(const GeneratorConfig& config) {
  std::vector<bool> plan;
  std::uint32_t prev = config.frame_rate();
  for (auto rate : config.rate_schedule) {
    plan.push_back(rate != prev);
    prev = rate;
  }
  return plan;
}

std::vector<TensorSpec> required_tensors(const GeneratorConfig& config) {
  config.validate();
  const std::size_t L = config.hidden_channels;
  const std::size_t K = config.kernel_size;
  const std::size_t F = config.cond_channels;
  std::vector<TensorSpec> out;
  out.push_back({"prior.embedding", {config.pitch_vocab, config.prior_channels}, "prior"});
  add_conv(out, "cond_head", "cond_head", config.cepstrum_dim, F, config.cond_head_kernel);
  const auto plan = upsampler_plan(config);
  std::size_t up = 0;
  for (std::size_t b = 0; b < config.rate_schedule.size(); ++b) {
    if (plan[b]) {
      const auto name = "upsample" + std::to_string(up++);
      add_conv(out, name, name, L, L, K);
    }
    const auto block = "block" + std::to_string(b);
    add_conv(out, block + ".tade.cond", block, F, L, K);
    add_conv(out, block + ".tade.gamma", block, L, L, K);
    add_conv(out, block + ".tade.beta", block, L, L, K);
    add_conv(out, block + ".conv1", block, L, 2 * L, K);
    add_conv(out, block + ".conv2", block, L, 2 * L, K);
  }
  add_conv(out, "output", "output", L, config.bands, K);
  return out;
}

void WeightStore::set(const std::string& name, Tensor tensor) {
  if (tensor.data.size() != element_count(tensor.shape)) {
    throw ShapeError("tensor " + name + ": data size does not match shape " + shape_string(tensor.shape));
  }
  tensors_[name] = std::move(tensor);
}

const Tensor& WeightStore::require(const std::string& name, std::span<const std::size_t> shape) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ValidationError("weight store: missing tensor " + name);
  if (!std::equal(it->second.shape.begin(), it->second.shape.end(), shape.begin(), shape.end())) {
    throw ValidationError("weight store: tensor " + name + " has shape " + shape_string(it->second.shape) +
                          ", expected " + shape_string(shape));
  }
  return it->second;
}

void WeightStore::validate() const {
  const auto specs = required_tensors(config_);
  for (const auto& spec : specs) require(spec.name, spec.shape);
  for (const auto& [name, _] : tensors_) {
    if (std::none_of(specs.begin(), specs.end(), [&](const TensorSpec& s) { return s.name == name; })) {
      throw ValidationError("weight store: unexpected tensor " + name);
    }
  }
}

std::size_t WeightStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors_) n += t.size();
  return n;
}

std::uint64_t WeightStore::fingerprint() const {
  io::Fnv1a h;
  h.update(config_.to_text());
  for (const auto& [name, t] : tensors_) {
    h.update(name);
    for (auto d : t.shape) h.update_u64(d);
    h.update(std::span<const float>(t.data));
  }
  return h.digest();
}

WeightStore random_weights(const GeneratorConfig& config, std::uint64_t seed) {
  WeightStore store(config);
  Rng rng(seed);
  const auto specs = required_tensors(config);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    Tensor t{spec.shape, std::vector<float>(element_count(spec.shape))};
    float bound = 1.0f;
    if (spec.name != "prior.embedding") {
      // Bias bound follows its weight's fan-in.
      const auto& wshape = spec.shape.size() == 3 ? spec.shape : specs[i - 1].shape;
      bound = 1.0f / std::sqrt(static_cast<float>(wshape[1] * wshape[2]));
    }
    for (auto& v : t.data) v = rng.uniform(-bound, bound);
    store.set(spec.name, std::move(t));
  }
  return store;
}

WeightStore zero_weights(const GeneratorConfig& config) {
  WeightStore store(config);
  for (const auto& spec : required_tensors(config)) {
    store.set(spec.name, Tensor{spec.shape, std::vector<float>(element_count(spec.shape), 0.0f)});
  }
  return store;
}

std::vector<std::uint8_t> serialize_weights(const WeightStore& store) {
  io::ByteWriter head;
  head.str(std::string_view(kWeightMagic.data(), 4));
  head.u16(kWeightVersion);
  head.lstr(store.config().to_text());
  head.u64(store.fingerprint());
  head.u32(static_cast<std::uint32_t>(store.tensors().size()));

  // Manifest size is known up front, so data offsets can be absolute.
  std::size_t manifest = 0;
  for (const auto& [name, t] : store.tensors()) manifest += 4 + name.size() + 4 + 4 * t.shape.size() + 8;
  std::size_t offset = head.bytes().size() + manifest;
  offset = (offset + 3) & ~std::size_t{3};

  for (const auto& [name, t] : store.tensors()) {
    head.lstr(name);
    head.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) head.u32(static_cast<std::uint32_t>(d));
    head.u64(offset);
    offset += t.size() * 4;
  }
  while (head.bytes().size() % 4 != 0) head.u8(0);
  for (const auto& [_, t] : store.tensors())
    for (float v : t.data) head.f32(v);
  return head.take();
}

WeightStore deserialize_weights(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "weight container");
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kWeightMagic.begin())) throw FormatError("weight container: bad magic");
  if (const auto v = r.u16(); v != kWeightVersion) {
    throw FormatError("weight container: unsupported version " + std::to_string(v));
  }
  WeightStore store(GeneratorConfig::from_text(r.lstr()));
  const auto fingerprint = r.u64();
  const auto count = r.u32();
  struct Entry {
    std::string name;
    std::vector<std::size_t> shape;
    std::uint64_t offset;
  };
  std::vector<Entry> entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    Entry e;
    e.name = r.lstr();
    const auto rank = r.u32();
    if (rank > 8) throw FormatError("weight container: implausible rank for " + e.name);
    for (std::uint32_t d = 0; d < rank; ++d) e.shape.push_back(r.u32());
    e.offset = r.u64();
    entries.push_back(std::move(e));
  }
  for (auto& e : entries) {
    const std::uint64_t n = element_count(e.shape);
    if (e.offset % 4 != 0 || e.offset > bytes.size() || n * 4 > bytes.size() - e.offset) {
      throw FormatError("weight container: tensor " + e.name + " lies outside the file");
    }
    io::ByteReader data(bytes.subspan(e.offset, n * 4), "weight container");
    Tensor t{std::move(e.shape), std::vector<float>(n)};
    for (auto& v : t.data) v = data.f32();
    store.set(e.name, std::move(t));
  }
  if (store.fingerprint() != fingerprint) throw FormatError("weight container: fingerprint mismatch");
  return store;
}

WeightStore load_weights(const std::filesystem::path& path) { return deserialize_weights(io::read_file(path)); }

void save_weights(const std::filesystem::path& path, const WeightStore& store) {
  io::write_file_atomic(path, serialize_weights(store));
}

}  // namespace ssmgan::model
