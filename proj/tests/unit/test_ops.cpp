#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ssmgan/dsp/ops.hpp"
#include "ssmgan/error.hpp"

using namespace ssmgan;
using namespace ssmgan::dsp;

TEST_CASE("channel_norm: constant channels go to zero") {
  const Matrix x(1, 4, std::vector<float>{3, 3, 3, 3});
  const auto y = channel_norm(x, 1e-5f);
  for (float v : y.values()) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("channel_norm: already normalized input is kept") {
  const Matrix x(1, 2, std::vector<float>{1, -1});
  const auto y = channel_norm(x, 0.0f);
  CHECK(y(0, 0) == doctest::Approx(1.0));
  CHECK(y(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("channel_norm: per-step statistics follow the eps formula") {
  Rng rng(3);
  for (float scale : {0.01f, 1.0f, 30.0f}) {
    const auto x = testutil::random_matrix(rng, 50, 64, scale);
    const auto y = channel_norm(x);
    for (std::size_t t = 0; t < x.rows(); ++t) {
      double mx = 0, vx = 0, my = 0, vy = 0;
      for (std::size_t c = 0; c < 64; ++c) mx += x(t, c), my += y(t, c);
      mx /= 64, my /= 64;
      for (std::size_t c = 0; c < 64; ++c) vx += (x(t, c) - mx) * (x(t, c) - mx), vy += (y(t, c) - my) * (y(t, c) - my);
      vx /= 64, vy /= 64;
      CHECK(std::abs(my) <= 1e-6);
      CHECK(vy == doctest::Approx(vx / (vx + kChannelNormEps)).epsilon(1e-4));
      if (scale >= 1.0f) CHECK(std::abs(vy - 1.0) <= 1e-4);
    }
  }
}

TEST_CASE("channel_norm is row-local and may alias") {
  Rng rng(4);
  auto x = testutil::random_matrix(rng, 10, 7);
  const auto full = channel_norm(x);
  for (std::size_t t = 0; t < 10; ++t) {
    const auto one = channel_norm(x.view().rows_slice(t, 1));
    for (std::size_t c = 0; c < 7; ++c) CHECK(one(0, c) == full(t, c));
  }
  channel_norm(x, kChannelNormEps, x);
  CHECK(x == full);
  CHECK_THROWS_AS(channel_norm(Matrix(3, 0)), ShapeError);
}

TEST_CASE("gated_activation") {
  Rng rng(5);
  SUBCASE("a = 0 gives zero") {
    const auto b = testutil::random_matrix(rng, 4, 6);
    const auto y = gated_activation(Matrix(4, 6), b);
    for (float v : y.values()) CHECK(v == 0.0f);
  }
  SUBCASE("uniform softmax divides tanh(a) by C") {
    const auto a = testutil::random_matrix(rng, 4, 6, 3.0f);
    const Matrix b(4, 6, 0.7f);
    const auto y = gated_activation(a, b);
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t c = 0; c < 6; ++c) CHECK(y(t, c) == doctest::Approx(std::tanh(a(t, c)) / 6.0));
  }
  SUBCASE("softmax weights sum to one") {
    const auto a = testutil::random_matrix(rng, 20, 16, 2.0f);
    const auto b = testutil::random_matrix(rng, 20, 16, 50.0f);  // large logits exercise stability
    const auto y = gated_activation(a, b);
    for (std::size_t t = 0; t < 20; ++t) {
      double sum = 0;
      for (std::size_t c = 0; c < 16; ++c) {
        REQUIRE(std::isfinite(y(t, c)));
        sum += y(t, c) / std::tanh(double(a(t, c)));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
    }
  }
  CHECK_THROWS_AS(gated_activation(Matrix(2, 3), Matrix(2, 4)), ShapeError);
}

TEST_CASE("upsample_rational: sample-and-hold examples") {
  const Matrix x(2, 1, std::vector<float>{1, 2});
  CHECK(upsample_rational(x, 2, 1).values() == std::vector<float>{1, 1, 2, 2});
  CHECK(upsample_rational(x, 5, 2).values() == std::vector<float>{1, 1, 1, 2, 2});
  CHECK(upsample_rational(x, 1, 1) == x);
}

TEST_CASE("upsample_rational: streaming matches global mapping when phase-aligned") {
  Rng rng(6);
  const auto x = testutil::random_matrix(rng, 20, 3);
  const auto whole = upsample_rational(x, 5, 2);
  REQUIRE(whole.rows() == 50);
  Matrix streamed(50, 3);
  for (std::size_t t = 0; t < 20; t += 2)
    upsample_rational(x.view().rows_slice(t, 2), 5, 2, streamed.view().rows_slice(t * 5 / 2, 5));
  CHECK(streamed == whole);

  Matrix out(2, 3);
  CHECK_THROWS_AS(upsample_rational(x.view().rows_slice(0, 1), 5, 2, out), InternalError);
  CHECK_THROWS_AS(upsample_rational(x, 0, 1), ShapeError);
}
