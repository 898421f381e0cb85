#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssmgan/codebook.hpp"
#include "ssmgan/dsp/conv.hpp"
#include "ssmgan/dsp/pqmf.hpp"
#include "ssmgan/model/config.hpp"
#include "ssmgan/model/tade.hpp"
#include "ssmgan/model/weights.hpp"

namespace ssmgan::model {

// Sample-and-hold resampling followed by a learnable causal conv (L -> L)
// at the output rate.
struct UpsampleLayer {
  Ratio ratio;
  dsp::ConvSpec conv;
};

// One residual block together with the content upsampler in front of it (if
// any) and the ratio used to bring the 100 Hz conditioning to its rate.
struct Stage {
  std::uint32_t rate = 0;
  std::size_t rows_per_frame = 0;
  Ratio cond_ratio;
  std::optional<std::size_t> upsampler;  // index into Generator::upsamplers()
  ResBlockParams block;
};

// Immutable generator graph:
//
//   pitch prior (100 Hz, L) -> [upsample -> TADE resblock] x 9 -> output conv
//   (L -> N) -> tanh -> PQMF synthesis
//
// The conditioning head (18 -> F, causal) runs at the frame rate and its
// output is held up to each block's rate independently.
class Generator {
 public:
  const GeneratorConfig& config() const { return config_; }
  const dsp::PqmfBank& pqmf() const { return pqmf_; }
  const Matrix& embedding() const { return embedding_; }
  const dsp::ConvSpec& cond_head() const { return cond_head_; }
  const std::vector<Stage>& stages() const { return stages_; }
  const std::vector<UpsampleLayer>& upsamplers() const { return upsamplers_; }
  const dsp::ConvSpec& output_conv() const { return output_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  friend Generator build_generator(const GeneratorConfig&, const WeightStore&);
  GeneratorConfig config_;
  dsp::PqmfBank pqmf_;
  Matrix embedding_;
  dsp::ConvSpec cond_head_;
  std::vector<Stage> stages_;
  std::vector<UpsampleLayer> upsamplers_;
  dsp::ConvSpec output_;
  std::uint64_t fingerprint_ = 0;
};

// Validates every tensor against `config`; throws ValidationError naming the
// first missing or mis-shaped tensor.
Generator build_generator(const GeneratorConfig& config, const WeightStore& weights);
inline Generator build_generator(const WeightStore& weights) { return build_generator(weights.config(), weights); }

// prior[i] = embedding[lag[i]] * corr[i]. Throws RangeError on a bad index.
void pitch_prior(std::span<const std::uint32_t> pitch_lag_idx, std::span<const float> pitch_corr,
                 ConstMatrixView embedding, MatrixView out);
Matrix pitch_prior(std::span<const std::uint32_t> pitch_lag_idx, std::span<const float> pitch_corr,
                   ConstMatrixView embedding);

// Stacks the cepstra of `frames` into an [n][18] matrix.
Matrix cepstra_matrix(std::span<const bitstream::FeatureFrame> frames);

// Offline conditioning head: [n] frames -> [n][F] at the frame rate.
Matrix cond_head(std::span<const bitstream::FeatureFrame> frames, const dsp::ConvSpec& head);

}  // namespace ssmgan::model
