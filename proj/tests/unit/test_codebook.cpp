#include "doctest.h"
#include "oracles.hpp"
#include "ssmgan/codebook.hpp"
#include "ssmgan/error.hpp"

using namespace ssmgan;
using namespace ssmgan::bitstream;

namespace {
const CodebookSet& books() {
  static const CodebookSet b = make_codebooks();
  return b;
}
}  // namespace

TEST_CASE("codebooks are reproducible from seed and tag") {
  CHECK(make_codebooks(5).fingerprint() == make_codebooks(5).fingerprint());
  CHECK(make_codebooks(5).fingerprint() != make_codebooks(6).fingerprint());
  CHECK(make_codebooks(5, "a").fingerprint() != make_codebooks(5, "b").fingerprint());
  CHECK_NOTHROW(books().validate());
}

TEST_CASE("codebook file round-trip and corruption") {
  const auto bytes = serialize_codebooks(books());
  const auto back = deserialize_codebooks(bytes);
  CHECK(back.fingerprint() == books().fingerprint());
  CHECK(back.version_tag == books().version_tag);

  auto bad = bytes;
  bad[1] = 'X';
  CHECK_THROWS_AS(deserialize_codebooks(bad), FormatError);
  auto cut = bytes;
  cut.resize(cut.size() - 5);
  CHECK_THROWS_AS(deserialize_codebooks(cut), FormatError);
}

TEST_CASE("validate rejects tables that do not cover their index range") {
  auto b = books();
  b.energy_table.pop_back();
  CHECK_THROWS_AS(b.validate(), ValidationError);
  b = books();
  b.abs_stages[1].resize(10);
  CHECK_THROWS_AS(b.validate(), ValidationError);
  b = books();
  b.corr_table[0] = 1.5f;
  CHECK_THROWS_AS(b.validate(), ValidationError);
}

TEST_CASE("all-zero packet decodes to codebook entry 0") {
  const CodedPacket zero;
  for (const auto& prev : {std::optional<Cepstrum>{}, std::optional<Cepstrum>{Cepstrum{}}}) {
    const auto frames = dequantize_packet(zero, prev, books());
    for (const auto& f : frames) {
      CHECK(f.cepstrum[0] == books().energy_table[0]);
      for (std::size_t d = 1; d < kCepstrumDim; ++d) CHECK(f.cepstrum[d] == 0.0f);
      CHECK(f.pitch_corr == books().corr_table[0]);
      CHECK(f.pitch_lag_idx == 0);
    }
  }
}

TEST_CASE("first packet without history uses the absolute decode for every frame") {
  Rng rng(1);
  const auto pkt = testutil::random_packet(rng);
  const auto frames = dequantize_packet(pkt, std::nullopt, books());
  const auto abs = books().absolute_vector(pkt.cepstrum_abs_idx);
  for (const auto& f : frames)
    for (std::size_t d = 0; d < kSpectralDim; ++d) CHECK(f.cepstrum[d + 1] == abs[d]);
}

TEST_CASE("frame layout: absolute, delta and interpolation rules") {
  Rng rng(9);
  auto pkt = testutil::random_packet(rng);
  Cepstrum prev{};
  for (auto& c : prev) c = rng.uniform(-1, 1);
  const auto abs = books().absolute_vector(pkt.cepstrum_abs_idx);
  const auto delta = books().delta_vector(pkt.cepstrum_delta_idx);

  for (std::uint32_t rule = 0; rule < 8; ++rule) {
    pkt.cepstrum_interp_idx = rule;
    const auto f = dequantize_packet(pkt, prev, books());
    const float w = kInterpolationWeights[rule];
    for (std::size_t d = 0; d < kSpectralDim; ++d) {
      const float f1 = abs[d] + delta[d];
      CHECK(f[3].cepstrum[d + 1] == abs[d]);
      CHECK(f[1].cepstrum[d + 1] == doctest::Approx(f1));
      CHECK(f[0].cepstrum[d + 1] == doctest::Approx((1 - w) * prev[d + 1] + w * f1));
      CHECK(f[2].cepstrum[d + 1] == doctest::Approx((1 - w) * f1 + w * abs[d]));
    }
  }
  // Rule 0 copies the left neighbour, rule 1 the right one, rule 2 takes the midpoint.
  pkt.cepstrum_interp_idx = 0;
  CHECK(dequantize_packet(pkt, prev, books())[0].cepstrum[1] == prev[1]);
  pkt.cepstrum_interp_idx = 1;
  CHECK(dequantize_packet(pkt, prev, books())[2].cepstrum[1] == abs[0]);
}

TEST_CASE("stationary input stays stationary") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pkt = testutil::random_packet(rng);
    // Steady state: the previous packet was this same packet.
    const auto warm = dequantize_packet(pkt, std::nullopt, books());
    const auto first = dequantize_packet(pkt, warm[3].cepstrum, books());
    const auto second = dequantize_packet(pkt, first[3].cepstrum, books());
    for (std::size_t f = 0; f < 4; ++f) REQUIRE(first[f] == second[f]);
  }
}

TEST_CASE("pitch modulation shifts the lag per frame and clamps") {
  CodedPacket pkt;
  pkt.pitch_lag_idx = 30;
  pkt.pitch_corr_idx = 3;
  for (std::uint32_t m = 0; m < 8; ++m) {
    pkt.pitch_mod_idx = m;
    const auto f = dequantize_packet(pkt, std::nullopt, books());
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(f[i].pitch_lag_idx == static_cast<std::uint32_t>(30 + books().pitch_mod_offsets[m][i]));
      CHECK(f[i].pitch_corr == 1.0f);
    }
  }
  CHECK(dequantize_packet(CodedPacket{}, std::nullopt, books())[0].pitch_lag_idx == 0);
  pkt.pitch_lag_idx = 63;
  pkt.pitch_mod_idx = 7;  // slope +4
  CHECK(dequantize_packet(pkt, std::nullopt, books())[3].pitch_lag_idx == 63);
  pkt.pitch_lag_idx = 0;
  const auto low = dequantize_packet(pkt, std::nullopt, books());
  CHECK(low[0].pitch_lag_idx == 0);  // 0 - 4 clamps
  CHECK(low[3].pitch_lag_idx == 8);
}

TEST_CASE("dequantize is deterministic and yields valid frames") {
  Rng rng(5);
  std::optional<Cepstrum> prev;
  for (int i = 0; i < 200; ++i) {
    const auto pkt = testutil::random_packet(rng);
    const auto a = dequantize_packet(pkt, prev, books());
    const auto b = dequantize_packet(pkt, prev, books());
    REQUIRE(a == b);
    for (const auto& f : a) CHECK_NOTHROW(f.validate());
    prev = a[3].cepstrum;
  }
}

TEST_CASE("FeatureFrame validation") {
  FeatureFrame f;
  CHECK_NOTHROW(f.validate());
  f.pitch_lag_idx = 64;
  CHECK_THROWS_AS(f.validate(), RangeError);
  f = {};
  f.pitch_corr = 1.01f;
  CHECK_THROWS_AS(f.validate(), RangeError);
  f = {};
  f.cepstrum[4] = std::nanf("");
  CHECK_THROWS_AS(f.validate(), RangeError);
}
