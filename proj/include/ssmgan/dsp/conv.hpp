#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssmgan/tensor.hpp"

namespace ssmgan::dsp {

// Weights and geometry of a causal 1-D convolution over time-major signals:
//
//   y[t][o] = bias[o] + sum_k sum_i w[o][i][k] * x[t - k * dilation][i]
//
// Tap k = 0 touches the newest input. Inputs before t = 0 are zero.
class ConvSpec {
 public:
  ConvSpec() = default;
  // `weights` is laid out [out][in][K]; `bias` has `out` entries.
  ConvSpec(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size, std::size_t dilation,
           std::vector<float> weights, std::vector<float> bias);

  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  std::size_t kernel_size() const { return kernel_; }
  std::size_t dilation() const { return dilation_; }
  std::size_t history_length() const { return (kernel_ - 1) * dilation_; }
  std::size_t parameter_count() const { return out_ * in_ * kernel_ + out_; }
  // Multiply-accumulates per output time step.
  std::size_t macs_per_step() const { return out_ * in_ * kernel_; }

  float weight(std::size_t o, std::size_t i, std::size_t k) const { return packed_[(k * in_ + i) * out_ + o]; }
  std::span<const float> bias() const { return bias_; }
  // [K][in][out] layout used by the kernels.
  std::span<const float> packed() const { return packed_; }

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::size_t kernel_ = 1;
  std::size_t dilation_ = 1;
  std::vector<float> packed_;
  std::vector<float> bias_;
};

// Rolling history of the last (K - 1) * dilation input rows of one conv.
class ConvState {
 public:
  ConvState() = default;
  explicit ConvState(const ConvSpec& spec);

  void reset();
  bool belongs_to(const ConvSpec& spec) const {
    return spec.in_channels() == channels_ && spec.history_length() == length_;
  }
  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }
  ConstMatrixView history() const { return {history_.data(), length_, channels_}; }
  MatrixView history() { return {history_.data(), length_, channels_}; }

 private:
  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> history_;
};

// Whole-signal causal convolution; output has the input's length.
Matrix causal_conv_offline(ConstMatrixView x, const ConvSpec& spec);
void causal_conv_offline(ConstMatrixView x, const ConvSpec& spec, MatrixView out);

// Processes one frame and advances `state`. Performs no allocation.
void causal_conv_step(ConvState& state, ConstMatrixView frame, const ConvSpec& spec, MatrixView out);
Matrix causal_conv_step(ConvState& state, ConstMatrixView frame, const ConvSpec& spec);

}  // namespace ssmgan::dsp
