#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ssmgan/bitstream.hpp"
#include "ssmgan/codebook.hpp"
#include "ssmgan/dsp/conv.hpp"
#include "ssmgan/dsp/pqmf.hpp"
#include "ssmgan/model/generator.hpp"
#include "ssmgan/model/tade.hpp"

namespace ssmgan::engine {

// Streaming decoder for one stream. Owns every history buffer of the graph
// and all scratch space; after construction decode_frame() and
// decode_packet() do not allocate.
//
// A session is single-owner. Several sessions may share one generator and run
// on different threads.
class Session {
 public:
  explicit Session(std::shared_ptr<const model::Generator> generator);

  const model::Generator& generator() const { return *generator_; }
  std::size_t frame_samples() const { return frame_samples_; }
  std::size_t packet_samples() const { return frame_samples_ * bitstream::kFramesPerPacket; }

  // Decodes one 10 ms frame into `pcm` (frame_samples() values).
  void decode_frame(const bitstream::FeatureFrame& frame, std::span<float> pcm);
  std::vector<float> decode_frame(const bitstream::FeatureFrame& frame);

  // Dequantizes a packet against the previous packet's cepstrum and decodes
  // its four frames into `pcm` (packet_samples() values).
  void decode_packet(const bitstream::CodedPacket& pkt, const bitstream::CodebookSet& books, std::span<float> pcm);
  std::vector<float> decode_packet(const bitstream::CodedPacket& pkt, const bitstream::CodebookSet& books);

  // Back to the cold-start state: zero histories, no previous packet.
  void reset();

  std::uint64_t frames_decoded() const { return frames_decoded_; }
  const std::optional<bitstream::Cepstrum>& previous_cepstrum() const { return prev_cepstrum_; }
  // Hash over all histories, the previous cepstrum and the frame counter.
  std::uint64_t state_fingerprint() const;

 private:
  struct StageState {
    dsp::ConvState upsample_conv;
    Matrix held;       // content after sample-and-hold, [rows][L]
    Matrix upsampled;  // after the upsampler conv
    Matrix cond;       // conditioning held to the block rate, [rows][F]
    model::ResBlockState block;
    Matrix out;
  };

  std::shared_ptr<const model::Generator> generator_;
  std::size_t frame_samples_ = 0;
  Matrix prior_;
  Matrix cepstrum_;
  Matrix cond_;
  dsp::ConvState cond_head_state_;
  std::vector<StageState> stages_;
  dsp::ConvState output_state_;
  Matrix bands_;
  dsp::PqmfSynthesisState pqmf_state_;
  std::optional<bitstream::Cepstrum> prev_cepstrum_;
  std::uint64_t frames_decoded_ = 0;
};

// Whole-utterance evaluation with offline ops; the reference for streaming.
std::vector<float> decode_offline(const model::Generator& generator, std::span<const bitstream::FeatureFrame> frames);

// Dequantizes a packet sequence in order (chaining the previous cepstrum).
std::vector<bitstream::FeatureFrame> dequantize_stream(std::span<const bitstream::CodedPacket> packets,
                                                       const bitstream::CodebookSet& books);

// Output-stage bound: PCM is clamped to [-1, 1] after PQMF synthesis.
inline constexpr float kOutputLimit = 1.0f;

}  // namespace ssmgan::engine
