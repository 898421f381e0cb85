#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "ssmgan/bitstream.hpp"
#include "ssmgan/codebook.hpp"
#include "ssmgan/engine/latency.hpp"
#include "ssmgan/engine/session.hpp"
#include "ssmgan/error.hpp"
#include "ssmgan/model/complexity.hpp"
#include "ssmgan/model/generator.hpp"
#include "ssmgan/model/weights.hpp"
#include "ssmgan/random.hpp"
#include "wav.hpp"

namespace ssmgan::cli {
namespace {

using Clock = std::chrono::steady_clock;

void print_latency(const engine::LatencyReport& r, std::ostream& out) {
  out << std::fixed << std::setprecision(3);
  out << "delay budget:\n";
  out << "  encoder packet extraction : " << r.encoder_ms << " ms (upstream, not incurred here)\n";
  out << "  network (causal convs)    : " << r.network_ms << " ms\n";
  out << "  PQMF cascade              : " << r.pqmf_ms << " ms (" << r.pqmf_declared_samples
      << " samples declared, " << r.pqmf_measured_samples << " measured)\n";
  out << "  total                     : " << r.total_ms() << " ms\n";
}

void print_throughput(double audio_seconds, double wall_seconds, std::ostream& out) {
  out << std::fixed << std::setprecision(2);
  out << "throughput: " << (wall_seconds > 0 ? audio_seconds / wall_seconds : 0.0) << "x real time ("
      << audio_seconds << " s audio in " << std::setprecision(3) << wall_seconds << " s)\n";
}

bitstream::FeatureFrame random_frame(Rng& rng) {
  bitstream::FeatureFrame f;
  for (auto& c : f.cepstrum) c = rng.uniform(-2.0f, 2.0f);
  f.pitch_lag_idx = static_cast<std::uint32_t>(rng.below(64));
  f.pitch_corr = rng.uniform01();
  return f;
}

}  // namespace

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const RangeError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ShapeError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_decode(const DecodeOptions& opts, std::ostream& out) {
  const auto stream = bitstream::load_stream(opts.bitstream);
  const auto weights = model::load_weights(opts.weights);
  const auto books = bitstream::load_codebooks(opts.codebooks);
  auto generator = std::make_shared<const model::Generator>(model::build_generator(weights));
  const auto& cfg = generator->config();
  if (stream.info.sample_rate != cfg.sample_rate) {
    throw ValidationError("stream sample rate " + std::to_string(stream.info.sample_rate) +
                          " does not match the model's " + std::to_string(cfg.sample_rate));
  }

  std::vector<float> pcm;
  const auto t0 = Clock::now();
  if (opts.mode == DecodeMode::kStreaming) {
    engine::Session session(generator);
    pcm.resize(stream.packets.size() * session.packet_samples());
    for (std::size_t i = 0; i < stream.packets.size(); ++i) {
      session.decode_packet(stream.packets[i], books,
                            std::span(pcm).subspan(i * session.packet_samples(), session.packet_samples()));
    }
  } else if (!stream.packets.empty()) {
    pcm = engine::decode_offline(*generator, engine::dequantize_stream(stream.packets, books));
  }
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  write_wav(opts.out, pcm, cfg.sample_rate, opts.float_wav ? WavEncoding::kFloat32 : WavEncoding::kPcm16);

  const double seconds = static_cast<double>(pcm.size()) / cfg.sample_rate;
  out << "packets: " << stream.packets.size() << " (" << stream.info.bitrate() << " b/s)\n";
  out << "mode: " << (opts.mode == DecodeMode::kStreaming ? "streaming" : "offline") << "\n";
  out << "duration: " << std::fixed << std::setprecision(3) << seconds << " s (" << pcm.size() << " samples)\n";
  print_throughput(seconds, wall, out);
  print_latency(engine::latency_report(*generator), out);
  out << "wrote " << opts.out.string() << "\n";
  return kExitOk;
}

int cmd_info(const InfoOptions& opts, std::ostream& out) {
  const model::WeightStore weights = opts.weights ? model::load_weights(*opts.weights)
                                                  : model::random_weights(model::GeneratorConfig{}, opts.seed);
  const auto& cfg = weights.config();
  auto generator = std::make_shared<const model::Generator>(model::build_generator(weights));

  out << (opts.weights ? "weights: " + opts.weights->string() : "default config (random weights, seed " +
                                                                    std::to_string(opts.seed) + ")")
      << "\n";
  out << "L=" << cfg.hidden_channels << " K=" << cfg.kernel_size << " F=" << cfg.cond_channels
      << " N=" << cfg.bands << " fs=" << cfg.sample_rate << " frame=" << cfg.frame_ms << "ms\n\n";

  const auto macs = model::mac_count(cfg);
  out << "complexity (closed form, MAC per output sample x rate):\n";
  out << "  layer        rate Hz   MAC/sample        MAC/s\n";
  for (const auto& l : macs.layers) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-10s %9llu %12llu %14llu\n", l.name.c_str(),
                  static_cast<unsigned long long>(l.rate), static_cast<unsigned long long>(l.macs_per_sample),
                  static_cast<unsigned long long>(l.macs_per_second));
    out << line;
  }
  out << "  total " << macs.total << " MAC/s = " << std::fixed << std::setprecision(2)
      << static_cast<double>(macs.total) / 1e9 << " GMAC/s\n";
  const auto structural = model::structural_mac_count(*generator);
  out << "  as built (all convs, head, PQMF): " << std::setprecision(2)
      << static_cast<double>(structural.total) / 1e9 << " GMAC/s\n\n";

  const auto params = model::param_count(weights);
  out << "parameters:\n";
  for (const auto& m : params.modules) out << "  " << std::left << std::setw(12) << m.module << std::right << m.count << "\n";
  out << "  total " << params.total << " (" << std::setprecision(3) << static_cast<double>(params.total) / 1e6
      << "M)\n\n";

  print_latency(engine::latency_report(*generator), out);

  Rng rng(opts.seed);
  engine::Session session(generator);
  std::vector<float> pcm(session.frame_samples());
  std::vector<bitstream::FeatureFrame> frames;
  for (std::size_t i = 0; i < opts.bench_frames; ++i) frames.push_back(random_frame(rng));
  const auto t0 = Clock::now();
  for (const auto& f : frames) session.decode_frame(f, pcm);
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
  out << "\n";
  print_throughput(static_cast<double>(opts.bench_frames) * cfg.frame_ms / 1000.0, wall, out);
  return kExitOk;
}

int cmd_gen_weights(std::uint64_t seed, const std::filesystem::path& out_path, std::ostream& out) {
  const auto store = model::random_weights(model::GeneratorConfig{}, seed);
  model::save_weights(out_path, store);
  out << "seed " << seed << ": " << store.parameter_count() << " parameters, fingerprint " << std::hex
      << store.fingerprint() << std::dec << " -> " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_gen_codebooks(std::uint64_t seed, const std::filesystem::path& out_path, std::ostream& out) {
  const auto books = bitstream::make_codebooks(seed);
  bitstream::save_codebooks(out_path, books);
  out << "seed " << seed << ": codebooks " << books.version_tag << " -> " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_gen_stream(std::uint64_t seed, std::uint32_t packets, const std::filesystem::path& out_path,
                   std::ostream& out) {
  Rng rng(seed);
  std::vector<bitstream::CodedPacket> pkts(packets);
  for (auto& p : pkts)
    for (const auto& field : bitstream::kPacketFields) {
      p.*field.member = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << field.width));
    }
  bitstream::save_stream(out_path, pkts);
  out << "seed " << seed << ": " << packets << " packets -> " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace ssmgan::cli
