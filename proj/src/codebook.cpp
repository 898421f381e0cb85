#include "ssmgan/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssmgan/binary_io.hpp"
#include "ssmgan/error.hpp"
#include "ssmgan/random.hpp"

namespace ssmgan::bitstream {
namespace {

constexpr std::array<char, 4> kCodebookMagic{'S', 'M', 'G', 'C'};
constexpr std::uint16_t kCodebookFormat = 1;

constexpr float kMinPitchPeriod = 32.0f;
constexpr float kMaxPitchPeriod = 256.0f;
constexpr float kEnergyMin = -4.0f;
constexpr float kEnergyMax = 12.0f;
constexpr std::array<std::int32_t, 8> kPitchSlopes{0, 1, -1, 2, -2, 3, -3, 4};
constexpr std::array<float, kAbsStages> kAbsStageScale{1.0f, 0.5f, 0.25f};
constexpr std::array<float, 2> kDeltaStageScale{0.25f, 0.125f};

std::vector<float> random_stage(Rng& rng, std::size_t entries, float scale) {
  std::vector<float> table(entries * kSpectralDim, 0.0f);
  // Entry 0 stays zero so the all-zero index decodes to a flat spectrum.
  for (std::size_t i = kSpectralDim; i < table.size(); ++i) table[i] = rng.uniform(-scale, scale);
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("codebook table " + what);
}

void check_finite(const std::vector<float>& t, const char* name) {
  for (float v : t) require(std::isfinite(v), std::string(name) + " holds a non-finite value");
}

}  // namespace

void FeatureFrame::validate() const {
  for (float c : cepstrum) {
    if (!std::isfinite(c)) throw RangeError("feature frame: non-finite cepstral coefficient");
  }
  if (pitch_lag_idx > 63) throw RangeError("feature frame: pitch_lag_idx " + std::to_string(pitch_lag_idx) + " > 63");
  if (!(pitch_corr >= 0.0f && pitch_corr <= 1.0f)) throw RangeError("feature frame: pitch_corr outside [0, 1]");
}

void CodebookSet::validate() const {
  require(pitch_lag_table.size() == 64, "pitch_lag must have 64 entries");
  require(pitch_mod_offsets.size() == 8, "pitch_modulation must have 8 rules");
  require(corr_table.size() == 4, "pitch_correlation must have 4 entries");
  for (float c : corr_table) require(c >= 0.0f && c <= 1.0f, "pitch_correlation entries must lie in [0, 1]");
  require(energy_table.size() == 128, "energy must have 128 entries");
  require(abs_stages.size() == kAbsStages, "cepstrum_absolute must have 3 stages");
  for (const auto& s : abs_stages) {
    require(s.size() == (std::size_t{1} << kAbsStageBits) * kSpectralDim, "cepstrum_absolute stage has wrong size");
    check_finite(s, "cepstrum_absolute");
  }
  require(delta_stages.size() == kDeltaStageBits.size(), "cepstrum_delta must have 2 stages");
  for (std::size_t i = 0; i < delta_stages.size(); ++i) {
    require(delta_stages[i].size() == (std::size_t{1} << kDeltaStageBits[i]) * kSpectralDim,
            "cepstrum_delta stage has wrong size");
    check_finite(delta_stages[i], "cepstrum_delta");
  }
  require(interp_weights.size() == 8, "cepstrum_interpolation must have 8 entries");
  for (float w : interp_weights) require(w >= 0.0f && w <= 1.0f, "interpolation weights must be convex");
  check_finite(pitch_lag_table, "pitch_lag");
  check_finite(energy_table, "energy");
}

std::uint64_t CodebookSet::fingerprint() const {
  io::Fnv1a h;
  h.update(version_tag);
  h.update_u64(seed);
  h.update(std::span<const float>(pitch_lag_table));
  for (const auto& rule : pitch_mod_offsets)
    for (auto o : rule) h.update_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(o)));
  h.update(std::span<const float>(corr_table));
  h.update(std::span<const float>(energy_table));
  for (const auto& s : abs_stages) h.update(std::span<const float>(s));
  for (const auto& s : delta_stages) h.update(std::span<const float>(s));
  h.update(std::span<const float>(interp_weights));
  return h.digest();
}

std::array<float, kSpectralDim> CodebookSet::absolute_vector(std::uint32_t idx) const {
  std::array<float, kSpectralDim> v{};
  constexpr std::uint32_t mask = (1u << kAbsStageBits) - 1;
  for (std::size_t s = 0; s < kAbsStages; ++s) {
    const std::size_t entry = (idx >> (kAbsStageBits * (kAbsStages - 1 - s))) & mask;
    const float* row = abs_stages[s].data() + entry * kSpectralDim;
    for (std::size_t d = 0; d < kSpectralDim; ++d) v[d] += row[d];
  }
  return v;
}

std::array<float, kSpectralDim> CodebookSet::delta_vector(std::uint32_t idx) const {
  std::array<float, kSpectralDim> v{};
  const std::size_t hi = idx >> kDeltaStageBits[1];
  const std::size_t lo = idx & ((1u << kDeltaStageBits[1]) - 1);
  const float* a = delta_stages[0].data() + hi * kSpectralDim;
  const float* b = delta_stages[1].data() + lo * kSpectralDim;
  for (std::size_t d = 0; d < kSpectralDim; ++d) v[d] = a[d] + b[d];
  return v;
}

CodebookSet make_codebooks(std::uint64_t seed, std::string_view version_tag) {
  CodebookSet books;
  books.version_tag = std::string(version_tag);
  books.seed = seed;

  books.pitch_lag_table.resize(64);
  for (std::size_t i = 0; i < 64; ++i) {
    books.pitch_lag_table[i] =
        kMinPitchPeriod * std::pow(kMaxPitchPeriod / kMinPitchPeriod, static_cast<float>(i) / 63.0f);
  }
  for (auto slope : kPitchSlopes) {
    std::array<std::int32_t, 4> rule{};
    for (std::int32_t f = 0; f < 4; ++f) rule[static_cast<std::size_t>(f)] = slope * (f - 1);
    books.pitch_mod_offsets.push_back(rule);
  }
  books.corr_table = {0.0f, 1.0f / 3.0f, 2.0f / 3.0f, 1.0f};
  books.energy_table.resize(128);
  for (std::size_t i = 0; i < 128; ++i) {
    books.energy_table[i] = kEnergyMin + (kEnergyMax - kEnergyMin) * static_cast<float>(i) / 127.0f;
  }

  Rng rng(seed);
  for (std::size_t s = 0; s < kAbsStages; ++s) {
    books.abs_stages.push_back(random_stage(rng, std::size_t{1} << kAbsStageBits, kAbsStageScale[s]));
  }
  for (std::size_t s = 0; s < kDeltaStageBits.size(); ++s) {
    books.delta_stages.push_back(random_stage(rng, std::size_t{1} << kDeltaStageBits[s], kDeltaStageScale[s]));
  }
  books.interp_weights.assign(kInterpolationWeights.begin(), kInterpolationWeights.end());
  return books;
}

namespace {

void put_table(io::ByteWriter& w, std::string_view name, std::size_t rows, std::size_t cols,
               const std::vector<float>& data) {
  w.lstr(name);
  w.u8(0);
  w.u32(static_cast<std::uint32_t>(rows));
  w.u32(static_cast<std::uint32_t>(cols));
  for (float v : data) w.f32(v);
}

struct RawTable {
  std::string name;
  std::uint8_t type = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> f32;
  std::vector<std::int32_t> i32;
};

const RawTable& find_table(const std::vector<RawTable>& tables, const std::string& name, std::uint8_t type,
                           std::size_t rows, std::size_t cols) {
  auto it = std::find_if(tables.begin(), tables.end(), [&](const RawTable& t) { return t.name == name; });
  if (it == tables.end()) throw FormatError("codebook file: missing table " + name);
  if (it->type != type || it->rows != rows || it->cols != cols) {
    throw FormatError("codebook file: table " + name + " has the wrong type or shape");
  }
  return *it;
}

}  // namespace

std::vector<std::uint8_t> serialize_codebooks(const CodebookSet& books) {
  books.validate();
  io::ByteWriter w;
  w.str(std::string_view(kCodebookMagic.data(), 4));
  w.u16(kCodebookFormat);
  w.lstr(books.version_tag);
  w.u64(books.seed);
  const auto table_count = 5 + books.abs_stages.size() + books.delta_stages.size();
  w.u32(static_cast<std::uint32_t>(table_count));

  put_table(w, "pitch_lag", 64, 1, books.pitch_lag_table);
  w.lstr("pitch_modulation");
  w.u8(1);
  w.u32(8);
  w.u32(4);
  for (const auto& rule : books.pitch_mod_offsets)
    for (auto o : rule) w.i32(o);
  put_table(w, "pitch_correlation", 4, 1, books.corr_table);
  put_table(w, "energy", 128, 1, books.energy_table);
  for (std::size_t s = 0; s < books.abs_stages.size(); ++s) {
    put_table(w, "cepstrum_absolute." + std::to_string(s), std::size_t{1} << kAbsStageBits, kSpectralDim,
              books.abs_stages[s]);
  }
  for (std::size_t s = 0; s < books.delta_stages.size(); ++s) {
    put_table(w, "cepstrum_delta." + std::to_string(s), std::size_t{1} << kDeltaStageBits[s], kSpectralDim,
              books.delta_stages[s]);
  }
  put_table(w, "cepstrum_interpolation", 8, 1, books.interp_weights);
  return w.take();
}

CodebookSet deserialize_codebooks(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "codebook file");
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kCodebookMagic.begin())) throw FormatError("codebook file: bad magic");
  if (const auto fmt = r.u16(); fmt != kCodebookFormat) {
    throw FormatError("codebook file: unsupported format " + std::to_string(fmt));
  }
  CodebookSet books;
  books.version_tag = r.lstr();
  books.seed = r.u64();
  const auto count = r.u32();
  std::vector<RawTable> tables;
  for (std::uint32_t i = 0; i < count; ++i) {
    RawTable t;
    t.name = r.lstr();
    t.type = r.u8();
    t.rows = r.u32();
    t.cols = r.u32();
    const std::uint64_t n = std::uint64_t{t.rows} * t.cols;
    if (n * 4 > r.remaining()) throw FormatError("codebook file: table " + t.name + " truncated");
    if (t.type == 0) {
      t.f32.resize(n);
      for (auto& v : t.f32) v = r.f32();
    } else if (t.type == 1) {
      t.i32.resize(n);
      for (auto& v : t.i32) v = r.i32();
    } else {
      throw FormatError("codebook file: unknown table type in " + t.name);
    }
    tables.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw FormatError("codebook file: trailing bytes");

  books.pitch_lag_table = find_table(tables, "pitch_lag", 0, 64, 1).f32;
  const auto& mod = find_table(tables, "pitch_modulation", 1, 8, 4).i32;
  for (std::size_t m = 0; m < 8; ++m) {
    std::array<std::int32_t, 4> rule{};
    std::copy_n(mod.begin() + static_cast<std::ptrdiff_t>(m * 4), 4, rule.begin());
    books.pitch_mod_offsets.push_back(rule);
  }
  books.corr_table = find_table(tables, "pitch_correlation", 0, 4, 1).f32;
  books.energy_table = find_table(tables, "energy", 0, 128, 1).f32;
  for (std::size_t s = 0; s < kAbsStages; ++s) {
    books.abs_stages.push_back(find_table(tables, "cepstrum_absolute." + std::to_string(s), 0,
                                          std::size_t{1} << kAbsStageBits, kSpectralDim)
                                   .f32);
  }
  for (std::size_t s = 0; s < kDeltaStageBits.size(); ++s) {
    books.delta_stages.push_back(find_table(tables, "cepstrum_delta." + std::to_string(s), 0,
                                            std::size_t{1} << kDeltaStageBits[s], kSpectralDim)
                                     .f32);
  }
  books.interp_weights = find_table(tables, "cepstrum_interpolation", 0, 8, 1).f32;
  books.validate();
  return books;
}

CodebookSet load_codebooks(const std::filesystem::path& path) { return deserialize_codebooks(io::read_file(path)); }

void save_codebooks(const std::filesystem::path& path, const CodebookSet& books) {
  io::write_file_atomic(path, serialize_codebooks(books));
}

PacketFrames dequantize_packet(const CodedPacket& pkt, const std::optional<Cepstrum>& prev, const CodebookSet& books) {
  validate_packet(pkt);

  const float energy = books.energy_table[pkt.energy_idx];
  const auto absolute = books.absolute_vector(pkt.cepstrum_abs_idx);

  std::array<std::array<float, kSpectralDim>, kFramesPerPacket> spectra;
  if (!prev) {
    spectra.fill(absolute);
  } else {
    const auto delta = books.delta_vector(pkt.cepstrum_delta_idx);
    const float w = books.interp_weights[pkt.cepstrum_interp_idx];
    auto& f1 = spectra[1];
    auto& f3 = spectra[3];
    f3 = absolute;
    for (std::size_t d = 0; d < kSpectralDim; ++d) f1[d] = absolute[d] + delta[d];
    for (std::size_t d = 0; d < kSpectralDim; ++d) {
      spectra[0][d] = (1.0f - w) * (*prev)[d + 1] + w * f1[d];
      spectra[2][d] = (1.0f - w) * f1[d] + w * f3[d];
    }
  }

  const auto& offsets = books.pitch_mod_offsets[pkt.pitch_mod_idx];
  PacketFrames frames;
  for (std::size_t f = 0; f < kFramesPerPacket; ++f) {
    auto& frame = frames[f];
    frame.cepstrum[0] = energy;
    std::copy(spectra[f].begin(), spectra[f].end(), frame.cepstrum.begin() + 1);
    const auto lag = static_cast<std::int32_t>(pkt.pitch_lag_idx) + offsets[f];
    frame.pitch_lag_idx = static_cast<std::uint32_t>(std::clamp(lag, 0, 63));
    frame.pitch_corr = books.corr_table[pkt.pitch_corr_idx];
  }
  return frames;
}

}  // namespace ssmgan::bitstream
