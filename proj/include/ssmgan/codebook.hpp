#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssmgan/bitstream.hpp"

namespace ssmgan::bitstream {

inline constexpr std::size_t kCepstrumDim = 18;  // c0 carries energy
inline constexpr std::size_t kSpectralDim = kCepstrumDim - 1;

using Cepstrum = std::array<float, kCepstrumDim>;

// Dequantized conditioning for one 10 ms frame.
struct FeatureFrame {
  Cepstrum cepstrum{};
  std::uint32_t pitch_lag_idx = 0;  // [0, 63]
  float pitch_corr = 0.0f;          // [0, 1]

  // Throws RangeError on non-finite cepstra or out-of-range pitch values.
  void validate() const;
  friend bool operator==(const FeatureFrame&, const FeatureFrame&) = default;
};

using PacketFrames = std::array<FeatureFrame, kFramesPerPacket>;

// Interpolation rules selected by the 3-bit field: weight w blends
// (1 - w) * left + w * right.
inline constexpr std::array<float, 8> kInterpolationWeights{0.0f,   1.0f, 0.5f,   0.125f,
                                                            0.25f, 0.375f, 0.625f, 0.75f};

inline constexpr std::size_t kAbsStageBits = 10;
inline constexpr std::size_t kAbsStages = 3;
inline constexpr std::array<std::size_t, 2> kDeltaStageBits{7, 6};

// Lookup tables for every coded field. This is a deterministic stand-in for
// the real LPCNet quantizers: same index layout, different values.
//
// Spectral cepstra c1..c17 use multi-stage VQ: the absolute index splits into
// three 10-bit stages (most significant first), the delta index into a 7-bit
// and a 6-bit stage. Entry 0 of every VQ stage is the zero vector.
struct CodebookSet {
  std::string version_tag;
  std::uint64_t seed = 0;

  std::vector<float> pitch_lag_table;                 // 64 periods, samples at 16 kHz
  std::vector<std::array<std::int32_t, 4>> pitch_mod_offsets;  // 8 rules x 4 frames, lag-index offsets
  std::vector<float> corr_table;                      // 4
  std::vector<float> energy_table;                    // 128, c0 values
  std::vector<std::vector<float>> abs_stages;         // 3 x [1024][17]
  std::vector<std::vector<float>> delta_stages;       // [128][17], [64][17]
  std::vector<float> interp_weights;                  // 8

  // Throws ValidationError when a table does not cover its field's index range.
  void validate() const;
  std::uint64_t fingerprint() const;

  // Sum of absolute-VQ stage vectors for a 30-bit index.
  std::array<float, kSpectralDim> absolute_vector(std::uint32_t idx) const;
  std::array<float, kSpectralDim> delta_vector(std::uint32_t idx) const;
};

inline constexpr std::string_view kDefaultCodebookTag = "ssmgan-cb-v1";
inline constexpr std::uint64_t kDefaultCodebookSeed = 0x5eed1600;

CodebookSet make_codebooks(std::uint64_t seed = kDefaultCodebookSeed,
                           std::string_view version_tag = kDefaultCodebookTag);

std::vector<std::uint8_t> serialize_codebooks(const CodebookSet& books);
CodebookSet deserialize_codebooks(std::span<const std::uint8_t> bytes);
CodebookSet load_codebooks(const std::filesystem::path& path);
void save_codebooks(const std::filesystem::path& path, const CodebookSet& books);

// Expands one packet into four 10 ms frames.
//
// Frame 3 is decoded from the absolute index, frame 1 adds the delta vector to
// frame 3, and frames 0 and 2 interpolate between their neighbours (previous
// packet's frame 3 and frame 1; frame 1 and frame 3) with the weight selected
// by the interpolation index. c0 of every frame is the energy value. Pitch lag
// index and correlation are replicated, with the lag shifted per frame by the
// pitch-modulation rule and clamped to [0, 63].
//
// Without `prev` (first packet of a stream) all four spectra are the absolute
// decode.
PacketFrames dequantize_packet(const CodedPacket& pkt, const std::optional<Cepstrum>& prev,
                               const CodebookSet& books);

}  // namespace ssmgan::bitstream
