#pragma once

#include <cstddef>

#include "ssmgan/dsp/conv.hpp"
#include "ssmgan/dsp/ops.hpp"
#include "ssmgan/tensor.hpp"

namespace ssmgan::model {

// Temporal adaptive de-normalization. The conditioning runs through a causal
// conv (F -> L) and two causal convs (L -> L) that produce gamma and beta.
struct TadeParams {
  dsp::ConvSpec cond;
  dsp::ConvSpec gamma;
  dsp::ConvSpec beta;
};

struct TadeOutput {
  Matrix styled;
  Matrix gamma;
  Matrix beta;
};

// out = gamma * channel_norm(content) + beta. `out` may alias `content`.
void modulate(ConstMatrixView content, ConstMatrixView gamma, ConstMatrixView beta, float eps, MatrixView out);

// Offline TADE over a whole signal; `cond` must already be at the content rate.
TadeOutput tade_modulate(ConstMatrixView cond, ConstMatrixView content, const TadeParams& params,
                         float eps = dsp::kChannelNormEps);

// Residual block with a single TADE whose gamma/beta are applied twice:
//
//   m1 = modulate(x)          -> conv1 (L -> 2L, K, dilation 1) -> gate -> g1
//   m2 = modulate(g1)         -> conv2 (L -> 2L, K, dilation 2) -> gate -> g2
//   out = x + g2
//
// The gate splits the 2L channels into (a, b) = (first L, last L) and applies
// tanh(a) * softmax(b).
struct ResBlockParams {
  TadeParams tade;
  dsp::ConvSpec conv1;
  dsp::ConvSpec conv2;

  std::size_t hidden_channels() const { return conv1.in_channels(); }
  std::size_t cond_channels() const { return tade.cond.in_channels(); }
  std::size_t parameter_count() const;
  // Multiply-accumulates per output sample summed over the block's convs.
  std::size_t macs_per_sample() const;
};

// Intermediate tensors of one offline block evaluation, for inspection.
struct ResBlockTrace {
  Matrix gamma;
  Matrix beta;
  Matrix modulated1;
  Matrix gated1;
  Matrix modulated2;
  Matrix gated2;
};

Matrix resblock_offline(const ResBlockParams& params, ConstMatrixView cond, ConstMatrixView x,
                        ResBlockTrace* trace = nullptr);

// Conv histories plus scratch for frames of up to `max_rows` rows.
class ResBlockState {
 public:
  ResBlockState() = default;
  ResBlockState(const ResBlockParams& params, std::size_t max_rows);

  void reset();
  bool belongs_to(const ResBlockParams& params) const;
  std::size_t max_rows() const { return max_rows_; }
  // Histories in a fixed order, for fingerprinting.
  template <typename Fn>
  void for_each_history(Fn&& fn) const {
    for (const auto* s : {&cond_, &gamma_, &beta_, &conv1_, &conv2_}) fn(s->history());
  }

 private:
  friend void tade_resblock_step(ResBlockState&, const ResBlockParams&, ConstMatrixView, ConstMatrixView, MatrixView);
  std::size_t max_rows_ = 0;
  dsp::ConvState cond_, gamma_, beta_, conv1_, conv2_;
  Matrix hidden_, gamma_buf_, beta_buf_, work_, wide_;
};

// One streaming step of the block. Allocation-free; `out` may not alias x.
void tade_resblock_step(ResBlockState& state, const ResBlockParams& params, ConstMatrixView cond_frame,
                        ConstMatrixView x_frame, MatrixView out);

}  // namespace ssmgan::model
