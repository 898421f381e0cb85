#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace ssmgan::bitstream {

// One 40 ms coded packet: seven fields, 64 bits in total.
struct CodedPacket {
  std::uint32_t pitch_lag_idx = 0;        // 6 bits
  std::uint32_t pitch_mod_idx = 0;        // 3 bits
  std::uint32_t pitch_corr_idx = 0;       // 2 bits
  std::uint32_t energy_idx = 0;           // 7 bits
  std::uint32_t cepstrum_abs_idx = 0;     // 30 bits
  std::uint32_t cepstrum_delta_idx = 0;   // 13 bits
  std::uint32_t cepstrum_interp_idx = 0;  // 3 bits

  friend bool operator==(const CodedPacket&, const CodedPacket&) = default;
};

struct FieldLayout {
  std::string_view name;
  unsigned width;
  std::uint32_t CodedPacket::*member;
};

// Fields in wire order (most significant first).
inline constexpr std::array<FieldLayout, 7> kPacketFields{{
    {"pitch_lag", 6, &CodedPacket::pitch_lag_idx},
    {"pitch_modulation", 3, &CodedPacket::pitch_mod_idx},
    {"pitch_correlation", 2, &CodedPacket::pitch_corr_idx},
    {"energy", 7, &CodedPacket::energy_idx},
    {"cepstrum_absolute", 30, &CodedPacket::cepstrum_abs_idx},
    {"cepstrum_delta", 13, &CodedPacket::cepstrum_delta_idx},
    {"cepstrum_interpolation", 3, &CodedPacket::cepstrum_interp_idx},
}};

inline constexpr unsigned kPacketBits = 64;
inline constexpr std::size_t kPacketBytes = 8;
inline constexpr unsigned kPacketMs = 40;
inline constexpr unsigned kFramesPerPacket = 4;

static_assert([] {
  unsigned sum = 0;
  for (const auto& f : kPacketFields) sum += f.width;
  return sum;
}() == kPacketBits);

using PacketBytes = std::array<std::uint8_t, kPacketBytes>;

// Throws RangeError naming the first field that does not fit its width.
void validate_packet(const CodedPacket& pkt);

PacketBytes pack_packet(const CodedPacket& pkt);
// Throws FormatError unless exactly 8 bytes are given.
CodedPacket parse_packet(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Stream container: "SMG1" magic, u16 version, u32 sample rate, u32 packet
// count (little-endian), followed by the packed packets.

inline constexpr std::array<char, 4> kStreamMagic{'S', 'M', 'G', '1'};
inline constexpr std::uint16_t kStreamVersion = 1;
inline constexpr std::size_t kStreamHeaderBytes = 14;

struct StreamInfo {
  std::uint16_t version = kStreamVersion;
  std::uint32_t sample_rate = 16000;
  std::uint32_t packet_count = 0;

  // Bits per second carried by the payload: 64 bits every 40 ms.
  std::uint32_t bitrate() const { return kPacketBits * 1000 / kPacketMs; }
  double duration_seconds() const { return packet_count * (kPacketMs / 1000.0); }
};

struct Stream {
  StreamInfo info;
  std::vector<CodedPacket> packets;
};

std::vector<std::uint8_t> write_stream(std::span<const CodedPacket> packets, std::uint32_t sample_rate = 16000);
Stream read_stream(std::span<const std::uint8_t> bytes);

Stream load_stream(const std::filesystem::path& path);
void save_stream(const std::filesystem::path& path, std::span<const CodedPacket> packets,
                 std::uint32_t sample_rate = 16000);

}  // namespace ssmgan::bitstream
