#include "ssmgan/dsp/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ssmgan/error.hpp"

namespace ssmgan::dsp {

void channel_norm(ConstMatrixView x, float eps, MatrixView out) {
  if (x.cols() == 0) throw ShapeError("channel_norm needs at least one channel");
  if (out.rows() != x.rows() || out.cols() != x.cols()) throw ShapeError("channel_norm output mis-shaped");
  const std::size_t C = x.cols();
  const float inv_c = 1.0f / static_cast<float>(C);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    auto in = x.row(t);
    auto dst = out.row(t);
    float mean = 0.0f;
    for (float v : in) mean += v;
    mean *= inv_c;
    float var = 0.0f;
    for (float v : in) var += (v - mean) * (v - mean);
    var *= inv_c;
    const float scale = 1.0f / std::sqrt(var + eps);
    for (std::size_t c = 0; c < C; ++c) dst[c] = (in[c] - mean) * scale;
  }
}

Matrix channel_norm(ConstMatrixView x, float eps) {
  Matrix out(x.rows(), x.cols());
  channel_norm(x, eps, out);
  return out;
}

void gated_activation(ConstMatrixView a, ConstMatrixView b, MatrixView out) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != a.cols()) {
    throw ShapeError("gated_activation operands mis-shaped");
  }
  const std::size_t C = a.cols();
  for (std::size_t t = 0; t < a.rows(); ++t) {
    auto av = a.row(t);
    auto bv = b.row(t);
    auto dst = out.row(t);
    const float peak = *std::max_element(bv.begin(), bv.end());
    float denom = 0.0f;
    for (std::size_t c = 0; c < C; ++c) {
      dst[c] = std::exp(bv[c] - peak);
      denom += dst[c];
    }
    const float inv = 1.0f / denom;
    for (std::size_t c = 0; c < C; ++c) dst[c] = std::tanh(av[c]) * dst[c] * inv;
  }
}

Matrix gated_activation(ConstMatrixView a, ConstMatrixView b) {
  Matrix out(a.rows(), a.cols());
  gated_activation(a, b, out);
  return out;
}

Matrix upsample_rational(ConstMatrixView x, std::size_t up, std::size_t down) {
  if (up == 0 || down == 0) throw ShapeError("upsample ratio must be positive");
  Matrix out(x.rows() * up / down, x.cols());
  for (std::size_t j = 0; j < out.rows(); ++j) {
    auto src = x.row(j * down / up);
    std::copy(src.begin(), src.end(), out.row(j).begin());
  }
  return out;
}

void upsample_rational(ConstMatrixView x, std::size_t up, std::size_t down, MatrixView out) {
  if (up == 0 || down == 0) throw ShapeError("upsample ratio must be positive");
  if ((x.rows() * up) % down != 0) {
    throw InternalError("upsampler phase misalignment: " + std::to_string(x.rows()) + " rows at ratio " +
                        std::to_string(up) + "/" + std::to_string(down));
  }
  if (out.rows() != x.rows() * up / down || out.cols() != x.cols()) throw ShapeError("upsample output mis-shaped");
  for (std::size_t j = 0; j < out.rows(); ++j) {
    auto src = x.row(j * down / up);
    std::copy(src.begin(), src.end(), out.row(j).begin());
  }
}

}  // namespace ssmgan::dsp
