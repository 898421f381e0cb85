#include "doctest.h"
#include "oracles.hpp"
#include "ssmgan/error.hpp"
#include "ssmgan/model/complexity.hpp"
#include "ssmgan/model/generator.hpp"
#include "ssmgan/model/weights.hpp"

using namespace ssmgan;
using namespace ssmgan::model;

TEST_CASE("default config values") {
  const GeneratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.hidden_channels == 64);
  CHECK(cfg.kernel_size == 9);
  CHECK(cfg.cond_channels == 80);
  CHECK(cfg.bands == 4);
  CHECK(cfg.sample_rate == 16000);
  CHECK(cfg.frame_samples() == 160);
  CHECK(cfg.band_rate() == 4000);
  CHECK(cfg.rows_per_frame(4000) == 40);
  CHECK(cfg.rows_per_frame(100) == 1);
  CHECK(cfg.rate_schedule.size() == 9);
}

TEST_CASE("config text round-trip and errors") {
  auto cfg = testutil::small_config();
  cfg.pqmf_cutoff = 0.1375;
  const auto back = GeneratorConfig::from_text(cfg.to_text());
  CHECK(back == cfg);
  CHECK(back.fingerprint() == cfg.fingerprint());
  CHECK(GeneratorConfig{}.fingerprint() != cfg.fingerprint());
  CHECK_THROWS_AS(GeneratorConfig::from_text("hidden_channels = x\n"), FormatError);
  CHECK_THROWS_AS(GeneratorConfig::from_text("bogus = 3\n"), FormatError);
  CHECK_THROWS_AS(GeneratorConfig::from_text("no equals sign\n"), FormatError);

  GeneratorConfig bad;
  bad.rate_schedule = {100, 300};  // last rate times 4 bands is not 16 kHz
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.rate_schedule = {200, 100, 4000};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.kernel_size = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("reduced ratios") {
  CHECK(reduced_ratio(200, 100) == Ratio{2, 1});
  CHECK(reduced_ratio(500, 200) == Ratio{5, 2});
  CHECK(reduced_ratio(4000, 4000) == Ratio{1, 1});
}

TEST_CASE("default generator: nine blocks, five upsamplers") {
  const auto g = build_generator(random_weights(GeneratorConfig{}, 1));
  CHECK(g.stages().size() == 9);
  REQUIRE(g.upsamplers().size() == 5);
  const std::vector<Ratio> expected{{2, 1}, {5, 2}, {2, 1}, {2, 1}, {2, 1}};
  for (std::size_t i = 0; i < 5; ++i) CHECK(g.upsamplers()[i].ratio == expected[i]);
  CHECK_FALSE(g.stages()[0].upsampler.has_value());
  for (std::size_t b = 6; b < 9; ++b) CHECK_FALSE(g.stages()[b].upsampler.has_value());
  CHECK(g.cond_head().out_channels() == 80);
  CHECK(g.cond_head().in_channels() == 18);
  CHECK(g.cond_head().kernel_size() == 3);
  CHECK(g.output_conv().out_channels() == 4);
  CHECK(g.embedding().rows() == 64);
  CHECK(g.stages().back().rows_per_frame * g.config().bands == 160);
  for (std::size_t b = 0; b < 9; ++b) CHECK(g.stages()[b].block.tade.gamma.out_channels() == 64);
}

TEST_CASE("build_generator names the missing or mis-shaped tensor") {
  const auto cfg = testutil::small_config();
  auto w = random_weights(cfg, 2);
  auto tensors = w.tensors();
  WeightStore missing(cfg);
  for (const auto& [name, t] : tensors)
    if (name != "block3.tade.gamma.weight") missing.set(name, t);
  CHECK_THROWS_WITH_AS(build_generator(missing), doctest::Contains("block3.tade.gamma.weight"), ValidationError);

  WeightStore misshaped(cfg);
  for (const auto& [name, t] : tensors) misshaped.set(name, t);
  misshaped.set("output.bias", Tensor{{5}, std::vector<float>(5, 0.0f)});
  CHECK_THROWS_WITH_AS(build_generator(misshaped), doctest::Contains("output.bias"), ValidationError);

  WeightStore extra(cfg);
  for (const auto& [name, t] : tensors) extra.set(name, t);
  extra.set("stray", Tensor{{1}, {0.0f}});
  CHECK_THROWS_WITH_AS(extra.validate(), doctest::Contains("stray"), ValidationError);

  CHECK_THROWS_AS(build_generator(GeneratorConfig{}, w), ValidationError);
  CHECK_THROWS_AS(w.set("x", Tensor{{2, 2}, {1.0f}}), ShapeError);
}

TEST_CASE("random weights are seeded and reproducible") {
  const auto cfg = testutil::small_config();
  const auto a = random_weights(cfg, 7);
  const auto b = random_weights(cfg, 7);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.tensors() == b.tensors());
  CHECK(random_weights(cfg, 8).fingerprint() != a.fingerprint());
  CHECK_NOTHROW(a.validate());
  CHECK(build_generator(a).fingerprint() == build_generator(b).fingerprint());
  // Init range: |w| <= 1/sqrt(fan_in).
  const auto& w = a.tensors().at("block0.conv1.weight");
  const float bound = 1.0f / std::sqrt(float(w.shape[1] * w.shape[2]));
  for (float v : w.data) REQUIRE(std::abs(v) <= bound);
}

TEST_CASE("weight container round-trip and corruption") {
  const auto w = random_weights(testutil::small_config(), 3);
  const auto bytes = serialize_weights(w);
  const auto back = deserialize_weights(bytes);
  CHECK(back.config() == w.config());
  CHECK(back.tensors() == w.tensors());
  CHECK(back.fingerprint() == w.fingerprint());

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_weights(bad), FormatError);
  auto cut = bytes;
  cut.resize(bytes.size() / 2);
  CHECK_THROWS_AS(deserialize_weights(cut), FormatError);
  auto flipped = bytes;
  flipped.back() ^= 0x40;  // payload change no longer matches the stored fingerprint
  CHECK_THROWS_AS(deserialize_weights(flipped), FormatError);
}

TEST_CASE("pitch prior") {
  Rng rng(4);
  const auto emb = testutil::random_matrix(rng, 64, 8);
  const std::vector<std::uint32_t> lag{3, 3, 40, 63};
  SUBCASE("zero correlation gives zero") {
    const auto p = pitch_prior(lag, std::vector<float>(4, 0.0f), emb);
    for (float v : p.values()) CHECK(v == 0.0f);
  }
  SUBCASE("rows are embedding rows scaled by correlation") {
    const std::vector<float> corr{1.0f, 1.0f, 0.5f, 0.25f};
    const auto p = pitch_prior(lag, corr, emb);
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(p(0, c) == p(1, c));
      CHECK(p(0, c) == emb(3, c));
      CHECK(p(2, c) == emb(40, c) * 0.5f);
    }
    std::vector<float> scaled(corr);
    for (auto& v : scaled) v *= 0.75f;
    const auto q = pitch_prior(lag, scaled, emb);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t c = 0; c < 8; ++c) CHECK(q(i, c) == emb(lag[i], c) * (corr[i] * 0.75f));
  }
  const std::vector<std::uint32_t> bad{64};
  CHECK_THROWS_AS(pitch_prior(bad, std::vector<float>{1.0f}, emb), RangeError);
}

TEST_CASE("conditioning head") {
  Rng rng(5);
  auto frames = testutil::random_frames(rng, 12);
  const auto w = random_weights(GeneratorConfig{}, 5);
  const auto g = build_generator(w);
  const auto y = cond_head(frames, g.cond_head());
  CHECK(y.rows() == 12);
  CHECK(y.cols() == 80);

  // Streaming the head frame by frame gives the same rows.
  dsp::ConvState state(g.cond_head());
  const auto cep = cepstra_matrix(frames);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto row = dsp::causal_conv_step(state, cep.view().rows_slice(i, 1), g.cond_head());
    CHECK(testutil::max_abs_diff(row.row(0), y.row(i)) <= 1e-6);
  }

  const auto z = zero_weights(GeneratorConfig{});
  for (auto& f : frames) f.cepstrum.fill(0.0f);
  const auto zero = cond_head(frames, build_generator(z).cond_head());
  for (float v : zero.values()) CHECK(v == 0.0f);
}

TEST_CASE("closed-form MAC count") {
  const GeneratorConfig cfg;
  const auto report = mac_count(cfg);
  CHECK(report.total == 4'845'772'800ull);
  CHECK(report.total == 400ull * 64 * 9 * 19800 + 4096ull * 9 * 7700);
  CHECK(report.total == oracle::closed_form_macs(80, 64, 9, cfg.rate_schedule, cfg.frame_rate()));
  CHECK(report.layers.size() == 14);

  GeneratorConfig one = testutil::small_config();
  for (auto [F, L, K] : {std::array<std::size_t, 3>{6, 8, 3}, {0, 4, 5}, {80, 32, 9}}) {
    one.cond_channels = F == 0 ? 1 : F;
    one.hidden_channels = L;
    one.prior_channels = L;
    one.kernel_size = K;
    CHECK(mac_count(one).total ==
          oracle::closed_form_macs(one.cond_channels, L, K, one.rate_schedule, one.frame_rate()));
  }
}

TEST_CASE("structural MAC count of the built graph") {
  const auto g = build_generator(random_weights(GeneratorConfig{}, 1));
  const auto s = structural_mac_count(g);
  std::uint64_t blocks = 0;
  for (const auto& l : s.layers)
    if (l.name.starts_with("block")) blocks += l.macs_per_second;
  CHECK(blocks == (80ull + 6 * 64) * 64 * 9 * 19800);
  CHECK(s.total > mac_count(GeneratorConfig{}).total);
}

TEST_CASE("parameter count") {
  CHECK(param_count(WeightStore{}).total == 0);
  const auto w = random_weights(GeneratorConfig{}, 1);
  const auto r = param_count(w);
  CHECK(r.total == w.parameter_count());
  CHECK(r.total == 2'604'852);
  CHECK(std::abs(double(r.total) - 2.73e6) / 2.73e6 <= 0.10);
  std::uint64_t sum = 0;
  for (const auto& m : r.modules) sum += m.count;
  CHECK(sum == r.total);
  CHECK(r.modules.front().module == "prior");
  CHECK(r.modules.back().module == "output");

  // Doubling L roughly quadruples the resblock conv parameters.
  GeneratorConfig wide;
  wide.hidden_channels = 128;
  wide.prior_channels = 128;
  const auto r2 = param_count(random_weights(wide, 1));
  auto block0 = [](const ParamReport& p) {
    for (const auto& m : p.modules)
      if (m.module == "block0") return double(m.count);
    return 0.0;
  };
  const double ratio = block0(r2) / block0(r);
  MESSAGE("block0 params L=64 -> L=128 ratio: ", ratio);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.0);
}
