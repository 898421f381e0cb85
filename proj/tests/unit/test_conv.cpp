#include "doctest.h"
#include "oracles.hpp"
#include "ssmgan/dsp/conv.hpp"
#include "ssmgan/error.hpp"

using namespace ssmgan;
using namespace ssmgan::dsp;

namespace {

ConvSpec random_spec(Rng& rng, std::size_t in, std::size_t out, std::size_t K, std::size_t d) {
  return ConvSpec(in, out, K, d, testutil::random_vector(rng, out * in * K), testutil::random_vector(rng, out));
}

std::vector<float> weights_of(const ConvSpec& s) {
  std::vector<float> w(s.out_channels() * s.in_channels() * s.kernel_size());
  for (std::size_t o = 0; o < s.out_channels(); ++o)
    for (std::size_t i = 0; i < s.in_channels(); ++i)
      for (std::size_t k = 0; k < s.kernel_size(); ++k) w[(o * s.in_channels() + i) * s.kernel_size() + k] = s.weight(o, i, k);
  return w;
}

Matrix stream_in_chunks(const ConvSpec& spec, const Matrix& x, std::size_t chunk) {
  ConvState state(spec);
  Matrix y(x.rows(), spec.out_channels());
  for (std::size_t t = 0; t < x.rows(); t += chunk) {
    const std::size_t n = std::min(chunk, x.rows() - t);
    causal_conv_step(state, x.view().rows_slice(t, n), spec, y.view().rows_slice(t, n));
  }
  return y;
}

}  // namespace

TEST_CASE("K=1 identity conv passes the input through") {
  const std::size_t C = 5;
  std::vector<float> w(C * C, 0.0f);
  for (std::size_t c = 0; c < C; ++c) w[(c * C + c)] = 1.0f;
  const ConvSpec spec(C, C, 1, 1, w, std::vector<float>(C, 0.0f));
  Rng rng(1);
  const auto x = testutil::random_matrix(rng, 13, C);
  CHECK(causal_conv_offline(x, spec) == x);
}

TEST_CASE("impulse response exposes taps newest first") {
  const ConvSpec spec(1, 1, 3, 1, {0.5f, -2.0f, 3.0f}, {0.0f});
  Matrix x(6, 1);
  x(0, 0) = 1.0f;
  const auto y = causal_conv_offline(x, spec);
  CHECK(y.values() == std::vector<float>{0.5f, -2.0f, 3.0f, 0.0f, 0.0f, 0.0f});

  const ConvSpec dilated(1, 1, 3, 2, {0.5f, -2.0f, 3.0f}, {1.0f});
  CHECK(causal_conv_offline(x, dilated).values() == std::vector<float>{1.5f, 1.0f, -1.0f, 1.0f, 4.0f, 1.0f});
}

TEST_CASE("offline conv matches the brute-force oracle") {
  Rng rng(42);
  struct Shape { std::size_t in, out, K, d, T; };
  for (const Shape s : {Shape{1, 1, 1, 1, 9}, Shape{3, 5, 3, 1, 40}, Shape{7, 4, 9, 2, 77}, Shape{64, 128, 9, 1, 41},
                        Shape{18, 80, 3, 1, 12}, Shape{6, 13, 4, 3, 5}}) {
    const auto spec = random_spec(rng, s.in, s.out, s.K, s.d);
    const auto x = testutil::random_matrix(rng, s.T, s.in);
    const auto y = causal_conv_offline(x, spec);
    const auto w = weights_of(spec);
    const std::vector<float> b(spec.bias().begin(), spec.bias().end());
    const auto ref = oracle::conv(oracle::to_rows(x), w, b, s.in, s.out, s.K, s.d);
    // Same sum over |terms|: float rounding scales with it, so the 1e-6
    // tolerance is applied per unit of accumulated magnitude.
    auto abs_of = [](std::vector<float> v) {
      for (auto& e : v) e = std::abs(e);
      return v;
    };
    auto xa = oracle::to_rows(x);
    for (auto& row : xa)
      for (auto& e : row) e = std::abs(e);
    const auto mag = oracle::conv(xa, abs_of(w), abs_of(b), s.in, s.out, s.K, s.d);
    double worst = 0.0;
    for (std::size_t t = 0; t < s.T; ++t)
      for (std::size_t o = 0; o < s.out; ++o)
        worst = std::max(worst, std::abs(y(t, o) - ref[t][o]) / std::max(1.0, mag[t][o]));
    INFO("in=", s.in, " out=", s.out, " K=", s.K, " d=", s.d);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("streaming equals offline for every chunking") {
  Rng rng(7);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto spec = random_spec(rng, 6, 10, 5, d);
    const auto x = testutil::random_matrix(rng, 153, 6);
    const auto ref = causal_conv_offline(x, spec);
    for (std::size_t chunk : {1u, 2u, 4u, 17u, 40u, 153u}) {
      INFO("d=", d, " chunk=", chunk);
      CHECK(testutil::max_abs_diff(stream_in_chunks(spec, x, chunk).values(), ref.values()) <= 1e-6);
    }
    // Frames of 1 and of 17 samples agree with each other, not only with offline.
    CHECK(testutil::max_abs_diff(stream_in_chunks(spec, x, 1).values(), stream_in_chunks(spec, x, 17).values()) <= 1e-6);
  }
}

TEST_CASE("single-step with the whole signal equals offline") {
  Rng rng(8);
  const auto spec = random_spec(rng, 4, 4, 3, 2);
  const auto x = testutil::random_matrix(rng, 30, 4);
  ConvState state(spec);
  CHECK(testutil::max_abs_diff(causal_conv_step(state, x, spec).values(), causal_conv_offline(x, spec).values()) <= 1e-6);
}

TEST_CASE("state keeps the trailing inputs and reset restores zeros") {
  Rng rng(9);
  const auto spec = random_spec(rng, 3, 2, 4, 2);
  ConvState state(spec);
  CHECK(state.length() == 6);
  const auto x = testutil::random_matrix(rng, 10, 3);
  const auto first = causal_conv_step(state, x, spec);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(state.history()(r, c) == x(4 + r, c));

  // Short frame: history shifts partially.
  const auto x2 = testutil::random_matrix(rng, 2, 3);
  causal_conv_step(state, x2, spec);
  CHECK(state.history()(3, 0) == x(9, 0));
  CHECK(state.history()(5, 2) == x2(1, 2));

  state.reset();
  for (std::size_t r = 0; r < 6; ++r)
    for (float v : state.history().row(r)) CHECK(v == 0.0f);
  CHECK(causal_conv_step(state, x, spec) == first);
}

TEST_CASE("causality: changing x[t..] leaves y[..t-1] untouched") {
  Rng rng(10);
  const auto spec = random_spec(rng, 4, 3, 5, 2);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = testutil::random_matrix(rng, 50, 4);
    const auto y = causal_conv_offline(x, spec);
    const std::size_t t0 = rng.below(50);
    for (std::size_t t = t0; t < 50; ++t)
      for (auto& v : x.row(t)) v = 0.0f;
    const auto y2 = causal_conv_offline(x, spec);
    for (std::size_t t = 0; t < t0; ++t)
      for (std::size_t o = 0; o < 3; ++o) REQUIRE(y(t, o) == y2(t, o));
  }
}

TEST_CASE("spec and shape errors") {
  CHECK_THROWS_AS(ConvSpec(2, 2, 0, 1, {}, {0, 0}), ShapeError);
  CHECK_THROWS_AS(ConvSpec(2, 2, 1, 0, {1, 0, 0, 1}, {0, 0}), ShapeError);
  CHECK_THROWS_AS(ConvSpec(2, 2, 1, 1, {1, 0, 0}, {0, 0}), ShapeError);
  CHECK_THROWS_AS(ConvSpec(2, 2, 1, 1, {1, 0, 0, 1}, {0}), ShapeError);

  const ConvSpec spec(2, 3, 3, 1, std::vector<float>(18, 0.1f), std::vector<float>(3, 0.0f));
  CHECK(spec.parameter_count() == 21);
  CHECK(spec.macs_per_step() == 18);
  CHECK_THROWS_AS(causal_conv_offline(Matrix(4, 3), spec), ShapeError);

  const ConvSpec other(2, 3, 5, 1, std::vector<float>(30, 0.1f), std::vector<float>(3, 0.0f));
  ConvState wrong(other);
  CHECK_FALSE(wrong.belongs_to(spec));
  CHECK_THROWS_AS(causal_conv_step(wrong, Matrix(4, 2), spec), StateError);
}
