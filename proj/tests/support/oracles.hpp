#pragma once

// Reference computations used as independent oracles. Deliberately naive:
// double precision, direct sums, no shared code with the library kernels.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ssmgan/codebook.hpp"
#include "ssmgan/model/config.hpp"
#include "ssmgan/random.hpp"
#include "ssmgan/tensor.hpp"

namespace oracle {

// y[t][o] = b[o] + sum_k sum_i w[o][i][k] x[t - k*d][i], weights [out][in][K].
inline std::vector<std::vector<double>> conv(const std::vector<std::vector<double>>& x,
                                             const std::vector<float>& w, const std::vector<float>& b,
                                             std::size_t in, std::size_t out, std::size_t K, std::size_t d) {
  std::vector<std::vector<double>> y(x.size(), std::vector<double>(out));
  for (std::size_t t = 0; t < x.size(); ++t)
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t k = 0; k < K; ++k) {
        if (t < k * d) continue;
        for (std::size_t i = 0; i < in; ++i) acc += double(w[(o * in + i) * K + k]) * x[t - k * d][i];
      }
      y[t][o] = acc;
    }
  return y;
}

// |H(e^{jw})| of an FIR by direct DTFT evaluation.
inline double magnitude(std::span<const float> h, double w) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < h.size(); ++n) acc += double(h[n]) * std::polar(1.0, -w * double(n));
  return std::abs(acc);
}

inline std::vector<std::vector<double>> to_rows(ssmgan::ConstMatrixView m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t t = 0; t < m.rows(); ++t)
    for (std::size_t c = 0; c < m.cols(); ++c) rows[t][c] = m(t, c);
  return rows;
}

// Closed-form complexity evaluated term by term, independent of the library.
inline std::uint64_t closed_form_macs(std::uint64_t F, std::uint64_t L, std::uint64_t K,
                                      const std::vector<std::uint32_t>& rates, std::uint32_t frame_rate) {
  std::uint64_t total = 0;
  std::uint32_t prev = frame_rate;
  for (auto r : rates) {
    total += (F + 5 * L) * L * K * r;
    if (r != prev) total += L * L * K * r;
    prev = r;
  }
  return total;
}

}  // namespace oracle

namespace testutil {

inline ssmgan::Matrix random_matrix(ssmgan::Rng& rng, std::size_t rows, std::size_t cols, float scale = 1.0f) {
  ssmgan::Matrix m(rows, cols);
  for (std::size_t t = 0; t < rows; ++t)
    for (auto& v : m.row(t)) v = rng.uniform(-scale, scale);
  return m;
}

inline std::vector<float> random_vector(ssmgan::Rng& rng, std::size_t n, float scale = 1.0f) {
  std::vector<float> v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

inline std::vector<ssmgan::bitstream::FeatureFrame> random_frames(ssmgan::Rng& rng, std::size_t n) {
  std::vector<ssmgan::bitstream::FeatureFrame> frames(n);
  for (auto& f : frames) {
    for (auto& c : f.cepstrum) c = rng.uniform(-2.0f, 2.0f);
    f.pitch_lag_idx = static_cast<std::uint32_t>(rng.below(64));
    f.pitch_corr = rng.uniform01();
  }
  return frames;
}

inline ssmgan::bitstream::CodedPacket random_packet(ssmgan::Rng& rng) {
  ssmgan::bitstream::CodedPacket p;
  for (const auto& field : ssmgan::bitstream::kPacketFields) {
    p.*field.member = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << field.width));
  }
  return p;
}

// Narrow generator for fast property tests: same topology rules, tiny widths.
inline ssmgan::model::GeneratorConfig small_config() {
  ssmgan::model::GeneratorConfig cfg;
  cfg.hidden_channels = 8;
  cfg.kernel_size = 3;
  cfg.cond_channels = 6;
  cfg.rate_schedule = {100, 200, 500, 1000, 4000, 4000};
  cfg.prior_channels = 8;
  return cfg;
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return a.size() == b.size() ? m : INFINITY;
}

}  // namespace testutil
