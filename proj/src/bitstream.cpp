#include "ssmgan/bitstream.hpp"

#include <algorithm>
#include <string>

#include "ssmgan/binary_io.hpp"
#include "ssmgan/error.hpp"

namespace ssmgan::bitstream {

void validate_packet(const CodedPacket& pkt) {
  for (const auto& field : kPacketFields) {
    const std::uint64_t value = pkt.*field.member;
    if (value >= (std::uint64_t{1} << field.width)) {
      throw RangeError("packet field " + std::string(field.name) + " = " + std::to_string(value) +
                       " does not fit in " + std::to_string(field.width) + " bits");
    }
  }
}

PacketBytes pack_packet(const CodedPacket& pkt) {
  validate_packet(pkt);
  std::uint64_t word = 0;
  for (const auto& field : kPacketFields) word = (word << field.width) | (pkt.*field.member);
  PacketBytes out{};
  for (std::size_t i = 0; i < kPacketBytes; ++i) out[i] = static_cast<std::uint8_t>(word >> (8 * (7 - i)));
  return out;
}

CodedPacket parse_packet(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kPacketBytes) {
    throw FormatError("packet must be exactly 8 bytes, got " + std::to_string(bytes.size()));
  }
  std::uint64_t word = 0;
  for (auto b : bytes) word = (word << 8) | b;
  CodedPacket pkt;
  unsigned consumed = 0;
  for (const auto& field : kPacketFields) {
    consumed += field.width;
    pkt.*field.member = static_cast<std::uint32_t>((word >> (kPacketBits - consumed)) &
                                                   ((std::uint64_t{1} << field.width) - 1));
  }
  return pkt;
}

std::vector<std::uint8_t> write_stream(std::span<const CodedPacket> packets, std::uint32_t sample_rate) {
  io::ByteWriter w;
  w.str(std::string_view(kStreamMagic.data(), kStreamMagic.size()));
  w.u16(kStreamVersion);
  w.u32(sample_rate);
  w.u32(static_cast<std::uint32_t>(packets.size()));
  for (const auto& pkt : packets) w.raw(pack_packet(pkt));
  return w.take();
}

Stream read_stream(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "stream container");
  if (bytes.size() < kStreamHeaderBytes) throw FormatError("stream container: header truncated");
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kStreamMagic.begin())) {
    throw FormatError("stream container: bad magic");
  }
  Stream stream;
  stream.info.version = r.u16();
  if (stream.info.version != kStreamVersion) {
    throw FormatError("stream container: unsupported version " + std::to_string(stream.info.version));
  }
  stream.info.sample_rate = r.u32();
  stream.info.packet_count = r.u32();
  const std::uint64_t payload = std::uint64_t{stream.info.packet_count} * kPacketBytes;
  if (r.remaining() != payload) {
    throw FormatError("stream container: payload holds " + std::to_string(r.remaining()) + " bytes, header declares " +
                      std::to_string(payload));
  }
  stream.packets.reserve(stream.info.packet_count);
  for (std::uint32_t i = 0; i < stream.info.packet_count; ++i) stream.packets.push_back(parse_packet(r.raw(kPacketBytes)));
  return stream;
}

Stream load_stream(const std::filesystem::path& path) { return read_stream(io::read_file(path)); }

void save_stream(const std::filesystem::path& path, std::span<const CodedPacket> packets, std::uint32_t sample_rate) {
  io::write_file_atomic(path, write_stream(packets, sample_rate));
}

}  // namespace ssmgan::bitstream
