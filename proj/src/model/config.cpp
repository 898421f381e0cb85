#include "ssmgan/model/config.hpp"

#include <charconv>
#include <map>
#include <numeric>
#include <sstream>

#include "ssmgan/binary_io.hpp"
#include "ssmgan/error.hpp"

namespace ssmgan::model {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("generator config: " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw FormatError("config: bad value for " + std::string(key));
  return out;
}

}  // namespace

Ratio reduced_ratio(std::uint32_t to_rate, std::uint32_t from_rate) {
  const auto g = std::gcd(to_rate, from_rate);
  return {to_rate / g, from_rate / g};
}

void GeneratorConfig::validate() const {
  require(hidden_channels >= 1 && kernel_size >= 1 && cond_channels >= 1, "channel counts and kernel must be positive");
  require(bands >= 2, "need at least 2 bands");
  require(frame_ms >= 1 && 1000 % frame_ms == 0, "frame_ms must divide 1000");
  require((sample_rate * frame_ms) % 1000 == 0, "frame must hold an integer number of samples");
  require(frame_samples() % bands == 0, "frame samples must be divisible by the band count");
  require(!rate_schedule.empty(), "rate schedule is empty");
  require(rate_schedule.front() >= frame_rate(), "first block rate must be at least the frame rate");
  for (std::size_t i = 0; i < rate_schedule.size(); ++i) {
    require((rate_schedule[i] * frame_ms) % 1000 == 0, "every block rate must give whole rows per frame");
    if (i > 0) require(rate_schedule[i] >= rate_schedule[i - 1], "rate schedule must be non-decreasing");
  }
  require(static_cast<std::uint64_t>(rate_schedule.back()) * bands == sample_rate,
          "last block rate times band count must equal the sample rate");
  require(prior_channels == hidden_channels, "prior channels must equal hidden channels");
  require(pitch_vocab == 64, "pitch vocabulary must match the 6-bit pitch lag index");
  require(cepstrum_dim == 18, "cepstrum dimension must be 18");
  require(cond_head_kernel >= 1, "conditioning head kernel must be positive");
  require(pqmf_taps >= 2 * bands && pqmf_taps % 2 == 0, "PQMF order must be even and at least 2 * bands");
}

std::string GeneratorConfig::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "hidden_channels = " << hidden_channels << "\n";
  os << "kernel_size = " << kernel_size << "\n";
  os << "cond_channels = " << cond_channels << "\n";
  os << "rate_schedule = ";
  for (std::size_t i = 0; i < rate_schedule.size(); ++i) os << (i ? "," : "") << rate_schedule[i];
  os << "\n";
  os << "bands = " << bands << "\n";
  os << "sample_rate = " << sample_rate << "\n";
  os << "frame_ms = " << frame_ms << "\n";
  os << "pitch_vocab = " << pitch_vocab << "\n";
  os << "prior_channels = " << prior_channels << "\n";
  os << "cepstrum_dim = " << cepstrum_dim << "\n";
  os << "cond_head_kernel = " << cond_head_kernel << "\n";
  os << "pqmf_taps = " << pqmf_taps << "\n";
  os << "pqmf_beta = " << pqmf_beta << "\n";
  os << "pqmf_cutoff = " << pqmf_cutoff << "\n";
  return os.str();
}

GeneratorConfig GeneratorConfig::from_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError("config: line without '=': " + std::string(line));
    kv.emplace(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }

  GeneratorConfig cfg;
  auto take = [&](std::string_view key, auto& field) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    field = parse_number<std::remove_reference_t<decltype(field)>>(key, it->second);
    kv.erase(it);
  };
  take("hidden_channels", cfg.hidden_channels);
  take("kernel_size", cfg.kernel_size);
  take("cond_channels", cfg.cond_channels);
  take("bands", cfg.bands);
  take("sample_rate", cfg.sample_rate);
  take("frame_ms", cfg.frame_ms);
  take("pitch_vocab", cfg.pitch_vocab);
  take("prior_channels", cfg.prior_channels);
  take("cepstrum_dim", cfg.cepstrum_dim);
  take("cond_head_kernel", cfg.cond_head_kernel);
  take("pqmf_taps", cfg.pqmf_taps);
  take("pqmf_beta", cfg.pqmf_beta);
  take("pqmf_cutoff", cfg.pqmf_cutoff);
  if (auto it = kv.find("rate_schedule"); it != kv.end()) {
    cfg.rate_schedule.clear();
    std::string_view list = it->second;
    while (!list.empty()) {
      const auto comma = list.find(',');
      cfg.rate_schedule.push_back(parse_number<std::uint32_t>("rate_schedule", trim(list.substr(0, comma))));
      list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
    }
    kv.erase(it);
  }
  if (!kv.empty()) throw FormatError("config: unknown key " + kv.begin()->first);
  return cfg;
}

std::uint64_t GeneratorConfig::fingerprint() const {
  io::Fnv1a h;
  h.update(to_text());
  return h.digest();
}

}  // namespace ssmgan::model
