#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssmgan/tensor.hpp"

namespace ssmgan::dsp {

// Cutoff (fraction of Nyquist) of the default 4-band prototype. Found by a
// one-off grid search over [0.10, 0.20] in steps of 5e-4 maximizing the
// analysis->synthesis reconstruction SNR on white noise (about 64 dB).
inline constexpr double kDefaultPqmfCutoff = 0.142;
inline constexpr std::size_t kDefaultPqmfBands = 4;
inline constexpr std::size_t kDefaultPqmfTaps = 62;
inline constexpr double kDefaultPqmfBeta = 9.0;

// Cosine-modulated pseudo-QMF bank built from one Kaiser-windowed sinc
// prototype of order `taps` (taps + 1 coefficients):
//
//   h_k[n] = 2 p[n] cos((2k+1) pi/(2N) (n - taps/2) + (-1)^k pi/4)   analysis
//   g_k[n] = 2 p[n] cos((2k+1) pi/(2N) (n - taps/2) - (-1)^k pi/4)   synthesis
//
// All filters are applied causally. Analysis decimates at phase
// (taps/2) mod N so that aliasing between adjacent bands cancels, which puts
// the analysis->synthesis delay at taps - (taps/2) mod N samples.
class PqmfBank {
 public:
  static PqmfBank design(std::size_t bands, std::size_t taps, double beta, double cutoff_ratio);

  std::size_t bands() const { return bands_; }
  std::size_t order() const { return taps_; }
  std::size_t length() const { return taps_ + 1; }
  std::span<const float> prototype() const { return prototype_; }
  std::span<const float> analysis(std::size_t band) const { return {analysis_.data() + band * length(), length()}; }
  std::span<const float> synthesis(std::size_t band) const { return {synthesis_.data() + band * length(), length()}; }
  std::size_t decimation_phase() const { return (taps_ / 2) % bands_; }
  // Delay of the analysis->synthesis cascade in full-rate samples.
  std::size_t declared_delay() const { return taps_ - decimation_phase(); }
  // Band samples of history the streaming synthesis keeps.
  std::size_t synthesis_history() const { return taps_ / bands_; }
  // N * g_k[r + qN] at [r][q][k], q < synthesis_history() + 1, zero-padded.
  std::span<const float> polyphase() const { return polyphase_; }

 private:
  std::size_t bands_ = 0;
  std::size_t taps_ = 0;
  std::vector<float> prototype_;
  std::vector<float> analysis_;   // [N][taps + 1]
  std::vector<float> synthesis_;  // [N][taps + 1]
  std::vector<float> polyphase_;
};

PqmfBank default_pqmf();

// Filter then decimate by N. x.size() must be a multiple of N. Only tests and
// tools use the analysis side; the decoder only synthesizes.
Matrix pqmf_analysis(std::span<const float> x, const PqmfBank& bank);

// Zero-insertion upsampling followed by direct FIR filtering. Reference path.
std::vector<float> pqmf_synthesis_offline(ConstMatrixView bands, const PqmfBank& bank);

class PqmfSynthesisState {
 public:
  PqmfSynthesisState() = default;
  explicit PqmfSynthesisState(const PqmfBank& bank);

  void reset();
  bool belongs_to(const PqmfBank& bank) const {
    return bank.bands() == bands_ && bank.synthesis_history() == length_;
  }
  std::span<const float> history() const { return history_; }

 private:
  std::size_t bands_ = 0;
  std::size_t length_ = 0;
  std::vector<float> history_;  // [length][N], newest last
  friend void pqmf_synthesis_step(PqmfSynthesisState&, ConstMatrixView, const PqmfBank&, std::span<float>);
};

// Streams `bands` ([t][N]) into t * N output samples. Allocation-free.
void pqmf_synthesis_step(PqmfSynthesisState& state, ConstMatrixView bands, const PqmfBank& bank,
                         std::span<float> out);
std::vector<float> pqmf_synthesis_step(PqmfSynthesisState& state, ConstMatrixView bands, const PqmfBank& bank);

}  // namespace ssmgan::dsp
