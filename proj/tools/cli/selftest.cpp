#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ssmgan/bitstream.hpp"
#include "ssmgan/codebook.hpp"
#include "ssmgan/dsp/conv.hpp"
#include "ssmgan/dsp/pqmf.hpp"
#include "ssmgan/engine/session.hpp"
#include "ssmgan/model/complexity.hpp"
#include "ssmgan/model/generator.hpp"
#include "ssmgan/random.hpp"
#include "wav.hpp"

namespace ssmgan::cli {
namespace {

struct Result {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  return m;
}

std::vector<bitstream::FeatureFrame> random_frames(Rng& rng, std::size_t n) {
  std::vector<bitstream::FeatureFrame> frames(n);
  for (auto& f : frames) {
    for (auto& c : f.cepstrum) c = rng.uniform(-2.0f, 2.0f);
    f.pitch_lag_idx = static_cast<std::uint32_t>(rng.below(64));
    f.pitch_corr = rng.uniform01();
  }
  return frames;
}

bitstream::CodedPacket random_packet(Rng& rng) {
  bitstream::CodedPacket p;
  for (const auto& field : bitstream::kPacketFields) {
    p.*field.member = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << field.width));
  }
  return p;
}

}  // namespace

int cmd_selftest(std::uint64_t seed, std::ostream& out) {
  out << "selftest seed " << seed << "\n";
  const model::GeneratorConfig cfg;
  auto weights = model::random_weights(cfg, seed);
  auto generator = std::make_shared<const model::Generator>(model::build_generator(weights));
  const auto books = bitstream::make_codebooks(seed);

  std::vector<std::pair<std::string, std::function<Result()>>> checks;

  checks.emplace_back("packet round-trip (10^4 random)", [&] {
    Rng rng(seed);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto p = random_packet(rng);
      if (bitstream::parse_packet(bitstream::pack_packet(p)) != p) ++failures;
    }
    return Result{failures == 0, std::to_string(failures) + " failures"};
  });

  checks.emplace_back("stream container round-trip", [&] {
    Rng rng(seed + 1);
    std::vector<bitstream::CodedPacket> pkts(25);
    for (auto& p : pkts) p = random_packet(rng);
    const auto s = bitstream::read_stream(bitstream::write_stream(pkts));
    return Result{s.packets == pkts && s.info.bitrate() == 1600, std::to_string(s.info.bitrate()) + " b/s"};
  });

  checks.emplace_back("conv chunk invariance", [&] {
    Rng rng(seed + 2);
    const std::size_t in = 5, outc = 3, k = 4, dil = 3;
    std::vector<float> w(outc * in * k), b(outc);
    for (auto& v : w) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    const dsp::ConvSpec spec(in, outc, k, dil, w, b);
    Matrix x(97, in);
    for (std::size_t t = 0; t < x.rows(); ++t)
      for (auto& v : x.row(t)) v = rng.uniform(-1, 1);
    const Matrix ref = dsp::causal_conv_offline(x, spec);
    double worst = 0.0;
    for (std::size_t chunk : {1u, 17u}) {
      dsp::ConvState st(spec);
      for (std::size_t t0 = 0; t0 < x.rows(); t0 += chunk) {
        const std::size_t n = std::min(chunk, x.rows() - t0);
        const Matrix y = dsp::causal_conv_step(st, x.view().rows_slice(t0, n), spec);
        worst = std::max(worst, max_abs_diff(y.values(), std::span(ref.values()).subspan(t0 * outc, n * outc)));
      }
    }
    return Result{worst <= 1e-6, "max diff " + fmt("%.3g", worst)};
  });

  checks.emplace_back("PQMF cascade SNR >= 45 dB", [&] {
    const auto& bank = generator->pqmf();
    Rng rng(seed + 3);
    std::vector<float> x(16000);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const auto y = dsp::pqmf_synthesis_offline(dsp::pqmf_analysis(x, bank), bank);
    const std::size_t d = bank.declared_delay();
    double sig = 0, err = 0;
    for (std::size_t n = d; n < x.size(); ++n) {
      sig += double(x[n - d]) * x[n - d];
      err += (double(y[n]) - x[n - d]) * (double(y[n]) - x[n - d]);
    }
    const double snr = 10 * std::log10(sig / err);
    return Result{snr >= 45.0, fmt("%.2f dB", snr)};
  });

  checks.emplace_back("mac_count closed form", [&] {
    const auto total = model::mac_count(cfg).total;
    return Result{total == 4845772800ULL, std::to_string(total) + " MAC/s"};
  });

  checks.emplace_back("parameter budget within 10% of 2.73M", [&] {
    const auto n = static_cast<double>(model::param_count(weights).total);
    return Result{std::abs(n / 2.73e6 - 1.0) <= 0.10, fmt("%.0f", n)};
  });

  const auto frames = [&] {
    Rng rng(seed + 4);
    return random_frames(rng, 40);
  }();

  std::vector<float> streamed;
  checks.emplace_back("streaming equals offline (40 frames, 1e-5)", [&] {
    engine::Session s(generator);
    for (const auto& f : frames) {
      const auto pcm = s.decode_frame(f);
      if (pcm.size() != 160) return Result{false, "frame length " + std::to_string(pcm.size())};
      streamed.insert(streamed.end(), pcm.begin(), pcm.end());
    }
    const auto offline = engine::decode_offline(*generator, frames);
    const double d = max_abs_diff(streamed, offline);
    return Result{d <= 1e-5, "max diff " + fmt("%.3g", d)};
  });

  checks.emplace_back("output bounded by 1", [&] {
    double peak = 0.0;
    for (float v : streamed) peak = std::max(peak, double(std::abs(v)));
    return Result{!streamed.empty() && peak <= 1.0 + 1e-3, "peak " + fmt("%.4f", peak)};
  });

  checks.emplace_back("reset reproduces output bit-exactly", [&] {
    engine::Session s(generator);
    const auto fresh = s.state_fingerprint();
    std::vector<float> a, b;
    for (const auto& f : frames) {
      auto p = s.decode_frame(f);
      a.insert(a.end(), p.begin(), p.end());
    }
    s.reset();
    const bool same_state = s.state_fingerprint() == fresh;
    for (const auto& f : frames) {
      auto p = s.decode_frame(f);
      b.insert(b.end(), p.begin(), p.end());
    }
    return Result{same_state && a == b, same_state ? "fingerprint restored" : "fingerprint differs"};
  });

  checks.emplace_back("packet decode equals frame decode (16-bit)", [&] {
    Rng rng(seed + 5);
    std::vector<bitstream::CodedPacket> pkts(5);
    for (auto& p : pkts) p = random_packet(rng);
    engine::Session by_packet(generator), by_frame(generator);
    std::vector<float> a, b;
    std::optional<bitstream::Cepstrum> prev;
    for (const auto& p : pkts) {
      auto pcm = by_packet.decode_packet(p, books);
      a.insert(a.end(), pcm.begin(), pcm.end());
      const auto fr = bitstream::dequantize_packet(p, prev, books);
      prev = fr.back().cepstrum;
      for (const auto& f : fr) {
        auto q = by_frame.decode_frame(f);
        b.insert(b.end(), q.begin(), q.end());
      }
    }
    const auto qa = quantize(a), qb = quantize(b);
    int worst = 0;
    for (std::size_t i = 0; i < qa.size(); ++i) worst = std::max(worst, std::abs(int(qa[i]) - int(qb[i])));
    return Result{qa.size() == qb.size() && worst <= 1, std::to_string(worst) + " LSB"};
  });

  int failed = 0;
  for (const auto& [name, check] : checks) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    out << (r.pass ? "PASS " : "FAIL ") << name << " : " << r.detail << "\n";
    if (!r.pass) ++failed;
  }
  out << (failed == 0 ? "all properties passed" : std::to_string(failed) + " properties failed") << "\n";
  return failed == 0 ? kExitOk : kExitSelftestFailed;
}

}  // namespace ssmgan::cli
