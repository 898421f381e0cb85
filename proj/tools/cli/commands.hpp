#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace ssmgan::cli {

// Process exit codes. Stable; documented in the README.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitFormat = 3,
  kExitValidation = 4,
  kExitSelftestFailed = 5,
  kExitInternal = 6,
};

enum class DecodeMode { kStreaming, kOffline };

struct DecodeOptions {
  std::filesystem::path bitstream;
  std::filesystem::path weights;
  std::filesystem::path codebooks;
  std::filesystem::path out;
  DecodeMode mode = DecodeMode::kStreaming;
  bool float_wav = false;
};

struct InfoOptions {
  std::optional<std::filesystem::path> weights;  // default config when empty
  std::uint64_t seed = 1;                        // random weights for the default-config benchmark
  std::size_t bench_frames = 25;
};

int cmd_decode(const DecodeOptions& opts, std::ostream& out);
int cmd_info(const InfoOptions& opts, std::ostream& out);
int cmd_selftest(std::uint64_t seed, std::ostream& out);

int cmd_gen_weights(std::uint64_t seed, const std::filesystem::path& out_path, std::ostream& out);
int cmd_gen_codebooks(std::uint64_t seed, const std::filesystem::path& out_path, std::ostream& out);
int cmd_gen_stream(std::uint64_t seed, std::uint32_t packets, const std::filesystem::path& out_path,
                   std::ostream& out);

// Runs `fn`, mapping library exceptions to exit codes and printing the
// message to `err`.
int run_guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace ssmgan::cli
