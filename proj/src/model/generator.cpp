#include "ssmgan/model/generator.hpp"

#include <string>

#include "ssmgan/error.hpp"

namespace ssmgan::model {
namespace {

dsp::ConvSpec make_conv(const WeightStore& w, const std::string& prefix, std::size_t in, std::size_t out,
                        std::size_t k, std::size_t dilation = 1) {
  const std::size_t wshape[] = {out, in, k};
  const std::size_t bshape[] = {out};
  const auto& weight = w.require(prefix + ".weight", wshape);
  const auto& bias = w.require(prefix + ".bias", bshape);
  return dsp::ConvSpec(in, out, k, dilation, weight.data, bias.data);
}

}  // namespace

Generator build_generator(const GeneratorConfig& config, const WeightStore& weights) {
  config.validate();
  if (weights.config() != config) throw ValidationError("weight store was built for a different config");
  weights.validate();

  const std::size_t L = config.hidden_channels;
  const std::size_t K = config.kernel_size;
  const std::size_t F = config.cond_channels;

  Generator g;
  g.config_ = config;
  g.pqmf_ = dsp::PqmfBank::design(config.bands, config.pqmf_taps, config.pqmf_beta, config.pqmf_cutoff);
  const std::size_t eshape[] = {config.pitch_vocab, config.prior_channels};
  g.embedding_ = Matrix(config.pitch_vocab, config.prior_channels, weights.require("prior.embedding", eshape).data);
  g.cond_head_ = make_conv(weights, "cond_head", config.cepstrum_dim, F, config.cond_head_kernel);

  const auto plan = upsampler_plan(config);
  std::uint32_t prev_rate = config.frame_rate();
  for (std::size_t b = 0; b < config.rate_schedule.size(); ++b) {
    Stage stage;
    stage.rate = config.rate_schedule[b];
    stage.rows_per_frame = config.rows_per_frame(stage.rate);
    stage.cond_ratio = reduced_ratio(stage.rate, config.frame_rate());
    if (plan[b]) {
      const auto name = "upsample" + std::to_string(g.upsamplers_.size());
      stage.upsampler = g.upsamplers_.size();
      g.upsamplers_.push_back({reduced_ratio(stage.rate, prev_rate), make_conv(weights, name, L, L, K)});
    }
    const auto block = "block" + std::to_string(b);
    stage.block.tade.cond = make_conv(weights, block + ".tade.cond", F, L, K);
    stage.block.tade.gamma = make_conv(weights, block + ".tade.gamma", L, L, K);
    stage.block.tade.beta = make_conv(weights, block + ".tade.beta", L, L, K);
    stage.block.conv1 = make_conv(weights, block + ".conv1", L, 2 * L, K, 1);
    stage.block.conv2 = make_conv(weights, block + ".conv2", L, 2 * L, K, 2);
    g.stages_.push_back(std::move(stage));
    prev_rate = config.rate_schedule[b];
  }
  g.output_ = make_conv(weights, "output", L, config.bands, K);
  g.fingerprint_ = weights.fingerprint();
  return g;
}

void pitch_prior(std::span<const std::uint32_t> pitch_lag_idx, std::span<const float> pitch_corr,
                 ConstMatrixView embedding, MatrixView out) {
  if (pitch_lag_idx.size() != pitch_corr.size() || out.rows() != pitch_lag_idx.size() ||
      out.cols() != embedding.cols()) {
    throw ShapeError("pitch prior shapes disagree");
  }
  for (std::size_t i = 0; i < pitch_lag_idx.size(); ++i) {
    if (pitch_lag_idx[i] >= embedding.rows()) {
      throw RangeError("pitch lag index " + std::to_string(pitch_lag_idx[i]) + " outside the embedding table");
    }
    auto e = embedding.row(pitch_lag_idx[i]);
    auto o = out.row(i);
    for (std::size_t c = 0; c < o.size(); ++c) o[c] = e[c] * pitch_corr[i];
  }
}

Matrix pitch_prior(std::span<const std::uint32_t> pitch_lag_idx, std::span<const float> pitch_corr,
                   ConstMatrixView embedding) {
  Matrix out(pitch_lag_idx.size(), embedding.cols());
  pitch_prior(pitch_lag_idx, pitch_corr, embedding, out);
  return out;
}

Matrix cepstra_matrix(std::span<const bitstream::FeatureFrame> frames) {
  Matrix out(frames.size(), bitstream::kCepstrumDim);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::copy(frames[i].cepstrum.begin(), frames[i].cepstrum.end(), out.row(i).begin());
  }
  return out;
}

Matrix cond_head(std::span<const bitstream::FeatureFrame> frames, const dsp::ConvSpec& head) {
  return dsp::causal_conv_offline(cepstra_matrix(frames), head);
}

}  // namespace ssmgan::model
