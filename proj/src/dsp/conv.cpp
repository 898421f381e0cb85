#include "ssmgan/dsp/conv.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "ssmgan/error.hpp"

namespace ssmgan::dsp {
namespace {

// Rows of the virtual signal [history; frame], addressed relative to the
// frame start (negative indices fall into the history).
struct RowSource {
  ConstMatrixView history;
  ConstMatrixView frame;

  const float* row(std::ptrdiff_t t) const {
    if (t >= 0) return frame.row(static_cast<std::size_t>(t)).data();
    const auto h = static_cast<std::ptrdiff_t>(history.rows()) + t;
    return h >= 0 ? history.row(static_cast<std::size_t>(h)).data() : nullptr;
  }
};

constexpr std::size_t kTimeBlock = 4;

// out[r][:] += sum_i x_r[i] * w[i][:] for up to kTimeBlock rows sharing the
// same weight slice. Rows with a null source contribute nothing.
inline void accumulate_tap(const float* const* src, float* const* dst, std::size_t rows, const float* __restrict w,
                           std::size_t in, std::size_t out) {
  if (rows == kTimeBlock && src[0] && src[1] && src[2] && src[3]) {
    float* __restrict d0 = dst[0];
    float* __restrict d1 = dst[1];
    float* __restrict d2 = dst[2];
    float* __restrict d3 = dst[3];
    for (std::size_t i = 0; i < in; ++i) {
      const float x0 = src[0][i], x1 = src[1][i], x2 = src[2][i], x3 = src[3][i];
      const float* __restrict wr = w + i * out;
      for (std::size_t o = 0; o < out; ++o) {
        const float wv = wr[o];
        d0[o] += wv * x0;
        d1[o] += wv * x1;
        d2[o] += wv * x2;
        d3[o] += wv * x3;
      }
    }
    return;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (!src[r]) continue;
    float* __restrict d = dst[r];
    for (std::size_t i = 0; i < in; ++i) {
      const float xv = src[r][i];
      const float* __restrict wr = w + i * out;
      for (std::size_t o = 0; o < out; ++o) d[o] += wr[o] * xv;
    }
  }
}

void run_conv(const RowSource& rows, const ConvSpec& spec, MatrixView out) {
  const std::size_t in = spec.in_channels();
  const std::size_t oc = spec.out_channels();
  const auto dil = static_cast<std::ptrdiff_t>(spec.dilation());
  const auto packed = spec.packed();
  const auto bias = spec.bias();
  const std::size_t T = out.rows();

  for (std::size_t t0 = 0; t0 < T; t0 += kTimeBlock) {
    const std::size_t n = std::min(kTimeBlock, T - t0);
    float* dst[kTimeBlock] = {};
    for (std::size_t r = 0; r < n; ++r) {
      dst[r] = out.row(t0 + r).data();
      std::copy(bias.begin(), bias.end(), dst[r]);
    }
    for (std::size_t k = 0; k < spec.kernel_size(); ++k) {
      const float* src[kTimeBlock] = {};
      for (std::size_t r = 0; r < n; ++r) {
        src[r] = rows.row(static_cast<std::ptrdiff_t>(t0 + r) - static_cast<std::ptrdiff_t>(k) * dil);
      }
      accumulate_tap(src, dst, n, packed.data() + k * in * oc, in, oc);
    }
  }
}

void check_shapes(ConstMatrixView x, const ConvSpec& spec, MatrixView out) {
  if (x.cols() != spec.in_channels()) {
    throw ShapeError("conv input has " + std::to_string(x.cols()) + " channels, expected " +
                     std::to_string(spec.in_channels()));
  }
  if (out.cols() != spec.out_channels() || out.rows() != x.rows()) throw ShapeError("conv output buffer mis-shaped");
}

}  // namespace

ConvSpec::ConvSpec(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size, std::size_t dilation,
                   std::vector<float> weights, std::vector<float> bias)
    : in_(in_channels), out_(out_channels), kernel_(kernel_size), dilation_(dilation), bias_(std::move(bias)) {
  if (kernel_ < 1) throw ShapeError("conv kernel size must be >= 1");
  if (dilation_ < 1) throw ShapeError("conv dilation must be >= 1");
  if (in_ == 0 || out_ == 0) throw ShapeError("conv channel counts must be positive");
  if (weights.size() != out_ * in_ * kernel_) {
    throw ShapeError("conv weights hold " + std::to_string(weights.size()) + " values, expected " +
                     std::to_string(out_ * in_ * kernel_));
  }
  if (bias_.size() != out_) throw ShapeError("conv bias size does not match out_channels");
  packed_.resize(weights.size());
  for (std::size_t o = 0; o < out_; ++o)
    for (std::size_t i = 0; i < in_; ++i)
      for (std::size_t k = 0; k < kernel_; ++k) packed_[(k * in_ + i) * out_ + o] = weights[(o * in_ + i) * kernel_ + k];
}

ConvState::ConvState(const ConvSpec& spec)
    : length_(spec.history_length()), channels_(spec.in_channels()), history_(length_ * channels_, 0.0f) {}

void ConvState::reset() { std::fill(history_.begin(), history_.end(), 0.0f); }

void causal_conv_offline(ConstMatrixView x, const ConvSpec& spec, MatrixView out) {
  check_shapes(x, spec, out);
  run_conv(RowSource{ConstMatrixView{}, x}, spec, out);
}

Matrix causal_conv_offline(ConstMatrixView x, const ConvSpec& spec) {
  Matrix out(x.rows(), spec.out_channels());
  causal_conv_offline(x, spec, out);
  return out;
}

void causal_conv_step(ConvState& state, ConstMatrixView frame, const ConvSpec& spec, MatrixView out) {
  if (!state.belongs_to(spec)) throw StateError("conv state does not belong to this conv spec");
  check_shapes(frame, spec, out);
  run_conv(RowSource{std::as_const(state).history(), frame}, spec, out);

  // Slide the history: keep the newest `length` rows of [history; frame].
  const std::size_t H = state.length();
  const std::size_t T = frame.rows();
  const std::size_t C = state.channels();
  if (H == 0) return;
  MatrixView hist = state.history();
  if (T >= H) {
    for (std::size_t r = 0; r < H; ++r) {
      auto src = frame.row(T - H + r);
      std::copy(src.begin(), src.end(), hist.row(r).begin());
    }
  } else {
    std::memmove(hist.data(), hist.data() + T * C, (H - T) * C * sizeof(float));
    for (std::size_t r = 0; r < T; ++r) {
      auto src = frame.row(r);
      std::copy(src.begin(), src.end(), hist.row(H - T + r).begin());
    }
  }
}

Matrix causal_conv_step(ConvState& state, ConstMatrixView frame, const ConvSpec& spec) {
  Matrix out(frame.rows(), spec.out_channels());
  causal_conv_step(state, frame, spec, out);
  return out;
}

}  // namespace ssmgan::dsp
