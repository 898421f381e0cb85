#include "ssmgan/engine/session.hpp"

#include <algorithm>
#include <cmath>

#include "ssmgan/binary_io.hpp"
#include "ssmgan/dsp/ops.hpp"
#include "ssmgan/error.hpp"

namespace ssmgan::engine {
namespace {

void finish_pcm(std::span<float> pcm) {
  for (auto& v : pcm) v = std::clamp(v, -kOutputLimit, kOutputLimit);
}

void tanh_inplace(MatrixView m) {
  for (std::size_t t = 0; t < m.rows(); ++t)
    for (auto& v : m.row(t)) v = std::tanh(v);
}

}  // namespace

Session::Session(std::shared_ptr<const model::Generator> generator) : generator_(std::move(generator)) {
  if (!generator_) throw ValidationError("session needs a generator");
  const auto& g = *generator_;
  const auto& cfg = g.config();
  const std::size_t L = cfg.hidden_channels;
  const std::size_t F = cfg.cond_channels;
  frame_samples_ = cfg.frame_samples();

  prior_ = Matrix(1, L);
  cepstrum_ = Matrix(1, cfg.cepstrum_dim);
  cond_ = Matrix(1, F);
  cond_head_state_ = dsp::ConvState(g.cond_head());
  for (const auto& stage : g.stages()) {
    StageState s;
    const std::size_t rows = stage.rows_per_frame;
    if (stage.upsampler) {
      s.upsample_conv = dsp::ConvState(g.upsamplers()[*stage.upsampler].conv);
      s.held = Matrix(rows, L);
      s.upsampled = Matrix(rows, L);
    }
    s.cond = Matrix(rows, F);
    s.block = model::ResBlockState(stage.block, rows);
    s.out = Matrix(rows, L);
    stages_.push_back(std::move(s));
  }
  output_state_ = dsp::ConvState(g.output_conv());
  bands_ = Matrix(frame_samples_ / cfg.bands, cfg.bands);
  pqmf_state_ = dsp::PqmfSynthesisState(g.pqmf());
}

void Session::decode_frame(const bitstream::FeatureFrame& frame, std::span<float> pcm) {
  if (pcm.size() != frame_samples_) throw ShapeError("decode_frame output must hold one frame of samples");
  frame.validate();
  const auto& g = *generator_;

  const std::uint32_t lag = frame.pitch_lag_idx;
  const float corr = frame.pitch_corr;
  model::pitch_prior(std::span(&lag, 1), std::span(&corr, 1), g.embedding(), prior_);

  std::copy(frame.cepstrum.begin(), frame.cepstrum.end(), cepstrum_.row(0).begin());
  dsp::causal_conv_step(cond_head_state_, cepstrum_, g.cond_head(), cond_);

  ConstMatrixView x = prior_;
  for (std::size_t b = 0; b < stages_.size(); ++b) {
    const auto& stage = g.stages()[b];
    auto& s = stages_[b];
    if (stage.upsampler) {
      const auto& up = g.upsamplers()[*stage.upsampler];
      dsp::upsample_rational(x, up.ratio.up, up.ratio.down, s.held);
      dsp::causal_conv_step(s.upsample_conv, s.held, up.conv, s.upsampled);
      x = s.upsampled;
    }
    dsp::upsample_rational(cond_, stage.cond_ratio.up, stage.cond_ratio.down, s.cond);
    model::tade_resblock_step(s.block, stage.block, s.cond, x, s.out);
    x = s.out;
  }

  dsp::causal_conv_step(output_state_, x, g.output_conv(), bands_);
  tanh_inplace(bands_);
  dsp::pqmf_synthesis_step(pqmf_state_, bands_, g.pqmf(), pcm);
  finish_pcm(pcm);
  ++frames_decoded_;
}

std::vector<float> Session::decode_frame(const bitstream::FeatureFrame& frame) {
  std::vector<float> pcm(frame_samples_);
  decode_frame(frame, pcm);
  return pcm;
}

void Session::decode_packet(const bitstream::CodedPacket& pkt, const bitstream::CodebookSet& books,
                            std::span<float> pcm) {
  if (pcm.size() != packet_samples()) throw ShapeError("decode_packet output must hold one packet of samples");
  const auto frames = bitstream::dequantize_packet(pkt, prev_cepstrum_, books);
  for (std::size_t f = 0; f < frames.size(); ++f) decode_frame(frames[f], pcm.subspan(f * frame_samples_, frame_samples_));
  prev_cepstrum_ = frames.back().cepstrum;
}

std::vector<float> Session::decode_packet(const bitstream::CodedPacket& pkt, const bitstream::CodebookSet& books) {
  std::vector<float> pcm(packet_samples());
  decode_packet(pkt, books, pcm);
  return pcm;
}

void Session::reset() {
  cond_head_state_.reset();
  for (auto& s : stages_) {
    s.upsample_conv.reset();
    s.block.reset();
  }
  output_state_.reset();
  pqmf_state_.reset();
  prev_cepstrum_.reset();
  frames_decoded_ = 0;
}

std::uint64_t Session::state_fingerprint() const {
  io::Fnv1a h;
  auto add = [&](ConstMatrixView m) {
    for (std::size_t t = 0; t < m.rows(); ++t) h.update(m.row(t));
  };
  add(cond_head_state_.history());
  for (const auto& s : stages_) {
    add(s.upsample_conv.history());
    s.block.for_each_history(add);
  }
  add(output_state_.history());
  h.update(pqmf_state_.history());
  h.update_u64(prev_cepstrum_.has_value());
  if (prev_cepstrum_) h.update(std::span<const float>(*prev_cepstrum_));
  h.update_u64(frames_decoded_);
  return h.digest();
}

std::vector<float> decode_offline(const model::Generator& g, std::span<const bitstream::FeatureFrame> frames) {
  if (frames.empty()) throw ShapeError("decode_offline needs at least one frame");
  std::vector<std::uint32_t> lags;
  std::vector<float> corrs;
  for (const auto& f : frames) {
    f.validate();
    lags.push_back(f.pitch_lag_idx);
    corrs.push_back(f.pitch_corr);
  }
  Matrix x = model::pitch_prior(lags, corrs, g.embedding());
  const Matrix cond = model::cond_head(frames, g.cond_head());

  for (const auto& stage : g.stages()) {
    if (stage.upsampler) {
      const auto& up = g.upsamplers()[*stage.upsampler];
      x = dsp::causal_conv_offline(dsp::upsample_rational(x, up.ratio.up, up.ratio.down), up.conv);
    }
    const Matrix held = dsp::upsample_rational(cond, stage.cond_ratio.up, stage.cond_ratio.down);
    x = model::resblock_offline(stage.block, held, x);
  }

  Matrix bands = dsp::causal_conv_offline(x, g.output_conv());
  tanh_inplace(bands);
  auto pcm = dsp::pqmf_synthesis_offline(bands, g.pqmf());
  finish_pcm(pcm);
  return pcm;
}

std::vector<bitstream::FeatureFrame> dequantize_stream(std::span<const bitstream::CodedPacket> packets,
                                                       const bitstream::CodebookSet& books) {
  std::vector<bitstream::FeatureFrame> frames;
  frames.reserve(packets.size() * bitstream::kFramesPerPacket);
  std::optional<bitstream::Cepstrum> prev;
  for (const auto& pkt : packets) {
    const auto decoded = bitstream::dequantize_packet(pkt, prev, books);
    frames.insert(frames.end(), decoded.begin(), decoded.end());
    prev = decoded.back().cepstrum;
  }
  return frames;
}

}  // namespace ssmgan::engine
