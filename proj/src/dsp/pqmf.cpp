#include "ssmgan/dsp/pqmf.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ssmgan/error.hpp"

namespace ssmgan::dsp {

PqmfBank PqmfBank::design(std::size_t bands, std::size_t taps, double beta, double cutoff_ratio) {
  if (bands < 2) throw ValidationError("PQMF needs at least 2 bands");
  if (taps < 2 * bands) throw ValidationError("PQMF order must be at least 2 * bands");
  if (taps % 2 != 0) throw ValidationError("PQMF order must be even (odd-length symmetric prototype)");
  if (!(cutoff_ratio > 0.0 && cutoff_ratio < 1.0)) throw ValidationError("PQMF cutoff must lie in (0, 1)");
  if (!(beta >= 0.0)) throw ValidationError("Kaiser beta must be non-negative");

  using std::numbers::pi;
  PqmfBank bank;
  bank.bands_ = bands;
  bank.taps_ = taps;
  const std::size_t len = taps + 1;
  const double center = static_cast<double>(taps) / 2.0;
  const double wc = pi * cutoff_ratio;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);

  bank.prototype_.resize(len);
  std::vector<double> proto(len);
  for (std::size_t n = 0; n < len; ++n) {
    const double m = static_cast<double>(n) - center;
    const double ideal = (m == 0.0) ? cutoff_ratio : std::sin(wc * m) / (pi * m);
    const double r = m / center;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    proto[n] = ideal * window;
    bank.prototype_[n] = static_cast<float>(proto[n]);
  }

  bank.analysis_.resize(bands * len);
  bank.synthesis_.resize(bands * len);
  for (std::size_t k = 0; k < bands; ++k) {
    const double freq = (2.0 * static_cast<double>(k) + 1.0) * pi / (2.0 * static_cast<double>(bands));
    const double phase = (k % 2 == 0 ? 1.0 : -1.0) * pi / 4.0;
    for (std::size_t n = 0; n < len; ++n) {
      const double arg = freq * (static_cast<double>(n) - center);
      bank.analysis_[k * len + n] = static_cast<float>(2.0 * proto[n] * std::cos(arg + phase));
      bank.synthesis_[k * len + n] = static_cast<float>(2.0 * proto[n] * std::cos(arg - phase));
    }
  }

  const std::size_t q_count = bank.synthesis_history() + 1;
  bank.polyphase_.assign(bands * q_count * bands, 0.0f);
  for (std::size_t r = 0; r < bands; ++r)
    for (std::size_t q = 0; q < q_count; ++q) {
      const std::size_t n = r + q * bands;
      if (n >= len) continue;
      for (std::size_t k = 0; k < bands; ++k) {
        bank.polyphase_[(r * q_count + q) * bands + k] =
            static_cast<float>(bands) * bank.synthesis_[k * len + n];
      }
    }
  return bank;
}

PqmfBank default_pqmf() {
  return PqmfBank::design(kDefaultPqmfBands, kDefaultPqmfTaps, kDefaultPqmfBeta, kDefaultPqmfCutoff);
}

Matrix pqmf_analysis(std::span<const float> x, const PqmfBank& bank) {
  const std::size_t N = bank.bands();
  if (x.size() % N != 0) {
    throw ShapeError("PQMF analysis input length " + std::to_string(x.size()) + " is not a multiple of " +
                     std::to_string(N));
  }
  const std::size_t len = bank.length();
  const std::size_t phase = bank.decimation_phase();
  Matrix out(x.size() / N, N);
  for (std::size_t m = 0; m < out.rows(); ++m) {
    const std::size_t n = m * N + phase;
    for (std::size_t k = 0; k < N; ++k) {
      const auto h = bank.analysis(k);
      double acc = 0.0;
      for (std::size_t j = 0; j < len && j <= n; ++j) acc += static_cast<double>(h[j]) * x[n - j];
      out(m, k) = static_cast<float>(acc);
    }
  }
  return out;
}

std::vector<float> pqmf_synthesis_offline(ConstMatrixView bands, const PqmfBank& bank) {
  const std::size_t N = bank.bands();
  if (bands.cols() != N) throw ShapeError("PQMF synthesis expects one column per band");
  const std::size_t total = bands.rows() * N;
  const std::size_t len = bank.length();
  // Double accumulation keeps this reference within one rounding of exact.
  std::vector<double> acc(total, 0.0);
  std::vector<float> upsampled(total);
  for (std::size_t k = 0; k < N; ++k) {
    std::fill(upsampled.begin(), upsampled.end(), 0.0f);
    for (std::size_t m = 0; m < bands.rows(); ++m) upsampled[m * N] = static_cast<float>(N) * bands(m, k);
    const auto g = bank.synthesis(k);
    for (std::size_t n = 0; n < total; ++n) {
      for (std::size_t j = 0; j < len && j <= n; ++j) acc[n] += static_cast<double>(g[j]) * upsampled[n - j];
    }
  }
  std::vector<float> y(total);
  for (std::size_t n = 0; n < total; ++n) y[n] = static_cast<float>(acc[n]);
  return y;
}

PqmfSynthesisState::PqmfSynthesisState(const PqmfBank& bank)
    : bands_(bank.bands()), length_(bank.synthesis_history()), history_(length_ * bands_, 0.0f) {}

void PqmfSynthesisState::reset() { std::fill(history_.begin(), history_.end(), 0.0f); }

void pqmf_synthesis_step(PqmfSynthesisState& state, ConstMatrixView bands, const PqmfBank& bank,
                         std::span<float> out) {
  if (!state.belongs_to(bank)) throw StateError("PQMF synthesis state does not belong to this bank");
  const std::size_t N = bank.bands();
  if (bands.cols() != N) throw ShapeError("PQMF synthesis expects one column per band");
  if (out.size() != bands.rows() * N) throw ShapeError("PQMF synthesis output has the wrong length");

  const std::size_t H = state.length_;
  const std::size_t Q = H + 1;
  const auto poly = bank.polyphase();
  float* hist = state.history_.data();

  auto band_row = [&](std::ptrdiff_t m) -> const float* {
    if (m >= 0) return bands.row(static_cast<std::size_t>(m)).data();
    const auto h = static_cast<std::ptrdiff_t>(H) + m;
    return h >= 0 ? hist + static_cast<std::size_t>(h) * N : nullptr;
  };

  for (std::size_t m = 0; m < bands.rows(); ++m) {
    for (std::size_t r = 0; r < N; ++r) {
      // 64 products per sample; accumulating in double is cheap here and
      // makes the result independent of chunking up to the final rounding.
      double acc = 0.0;
      for (std::size_t q = 0; q < Q; ++q) {
        const float* u = band_row(static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(q));
        if (!u) break;
        const float* c = poly.data() + (r * Q + q) * N;
        for (std::size_t k = 0; k < N; ++k) acc += static_cast<double>(c[k]) * u[k];
      }
      out[m * N + r] = static_cast<float>(acc);
    }
  }

  const std::size_t T = bands.rows();
  if (H == 0) return;
  if (T >= H) {
    for (std::size_t r = 0; r < H; ++r) {
      auto src = bands.row(T - H + r);
      std::copy(src.begin(), src.end(), hist + r * N);
    }
  } else {
    std::copy(hist + T * N, hist + H * N, hist);
    for (std::size_t r = 0; r < T; ++r) {
      auto src = bands.row(r);
      std::copy(src.begin(), src.end(), hist + (H - T + r) * N);
    }
  }
}

std::vector<float> pqmf_synthesis_step(PqmfSynthesisState& state, ConstMatrixView bands, const PqmfBank& bank) {
  std::vector<float> out(bands.rows() * bank.bands());
  pqmf_synthesis_step(state, bands, bank, out);
  return out;
}

}  // namespace ssmgan::dsp
