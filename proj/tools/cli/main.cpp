#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace ssmgan::cli;

  CLI::App app{"ssmgan: streaming decoder for 1.6 kb/s coded speech"};
  app.require_subcommand(1);

  DecodeOptions decode;
  std::string mode = "streaming";
  auto* dec = app.add_subcommand("decode", "Decode a bitstream container to WAV");
  dec->add_option("--bitstream", decode.bitstream, "Stream container (.smg)")->required();
  dec->add_option("--weights", decode.weights, "Weight container")->required();
  dec->add_option("--codebooks", decode.codebooks, "Codebook file")->required();
  dec->add_option("--out", decode.out, "Output WAV path")->required();
  dec->add_option("--mode", mode, "streaming | offline")->check(CLI::IsMember({"streaming", "offline"}));
  dec->add_flag("--float", decode.float_wav, "Write 32-bit float WAV instead of 16-bit PCM");

  InfoOptions info;
  std::string info_weights;
  bool default_config = false;
  auto* inf = app.add_subcommand("info", "Print complexity, parameters, delay budget and throughput");
  auto* wopt = inf->add_option("--weights", info_weights, "Weight container");
  inf->add_flag("--default-config", default_config, "Use the default config with seeded random weights")
      ->excludes(wopt);
  inf->add_option("--seed", info.seed, "Seed for default-config weights and benchmark input");
  inf->add_option("--bench-frames", info.bench_frames, "Frames decoded for the throughput measurement");

  std::uint64_t selftest_seed = 1;
  auto* st = app.add_subcommand("selftest", "Run the invariant suite on a seeded random generator");
  st->add_option("--seed", selftest_seed, "Seed");

  std::uint64_t gen_seed = 1;
  std::string gen_out;
  std::uint32_t gen_packets = 25;
  auto* gw = app.add_subcommand("gen-weights", "Write seeded random weights for the default config");
  gw->add_option("--seed", gen_seed, "Seed");
  gw->add_option("--out", gen_out, "Output path")->required();
  auto* gc = app.add_subcommand("gen-codebooks", "Write the seeded default codebooks");
  gc->add_option("--seed", gen_seed, "Seed");
  gc->add_option("--out", gen_out, "Output path")->required();
  auto* gs = app.add_subcommand("gen-stream", "Write a stream container of random packets");
  gs->add_option("--seed", gen_seed, "Seed");
  gs->add_option("--packets", gen_packets, "Packet count");
  gs->add_option("--out", gen_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  return run_guarded(
      [&]() -> int {
        if (dec->parsed()) {
          decode.mode = mode == "offline" ? DecodeMode::kOffline : DecodeMode::kStreaming;
          return cmd_decode(decode, std::cout);
        }
        if (inf->parsed()) {
          if (!info_weights.empty()) info.weights = info_weights;
          return cmd_info(info, std::cout);
        }
        if (st->parsed()) return cmd_selftest(selftest_seed, std::cout);
        if (gw->parsed()) return cmd_gen_weights(gen_seed, gen_out, std::cout);
        if (gc->parsed()) return cmd_gen_codebooks(gen_seed, gen_out, std::cout);
        if (gs->parsed()) return cmd_gen_stream(gen_seed, gen_packets, gen_out, std::cout);
        return kExitUsage;
      },
      std::cerr);
}
