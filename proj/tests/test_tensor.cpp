#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

#include "splitwire/tensor.hpp"

using namespace splitwire;

TEST_CASE("make_tensor builds exactly the given contents") {
  ActivationTensor t = make_tensor(1, 2, {0.5f, -1.0f});
  CHECK(t.rows() == 1);
  CHECK(t.cols() == 2);
  CHECK(t.at(0, 0) == 0.5f);
  CHECK(t.at(0, 1) == -1.0f);
}

TEST_CASE("make_tensor accepts empty tensors") {
  ActivationTensor t = make_tensor(0, 8, {});
  CHECK(t.rows() == 0);
  CHECK(t.cols() == 8);
  CHECK(t.size() == 0);
}

TEST_CASE("make_tensor rejects bad input") {
  CHECK_THROWS_AS(make_tensor(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(make_tensor(1, 1, {std::numeric_limits<float>::quiet_NaN()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_tensor(1, 1, {std::numeric_limits<float>::infinity()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_tensor(1, 0, {}), std::invalid_argument);
}

TEST_CASE("synth_activations is deterministic in the seed") {
  OutlierStats stats{100.0f, 1e-3, 5.0f};
  ActivationTensor a = synth_activations(64, 128, stats, 42);
  ActivationTensor b = synth_activations(64, 128, stats, 42);
  ActivationTensor c = synth_activations(64, 128, stats, 43);
  CHECK(a.bit_equal(b));
  CHECK_FALSE(a.bit_equal(c));
}

TEST_CASE("synth_activations with fraction 0 stays strictly below the threshold") {
  OutlierStats stats{10.0f, 0.0, 5.0f};
  ActivationTensor t = synth_activations(256, 256, stats, 7);
  for (float v : t.values()) CHECK(std::abs(v) < 10.0f);
}

TEST_CASE("synth_activations rejects zero-size requests") {
  CHECK_THROWS_AS(synth_activations(0, 16, fig4_default_stats(), 0), std::invalid_argument);
  CHECK_THROWS_AS(synth_activations(16, 0, fig4_default_stats(), 0), std::invalid_argument);
}

TEST_CASE("observed outlier fraction matches the target on a 4096x4096 draw") {
  // Explicit-stats variant with bulk scale 5; the preset differs only in the
  // dispersion knob.
  OutlierStats stats{100.0f, 5e-6, 5.0f};
  ActivationTensor t = synth_activations(4096, 4096, stats, 1);
  size_t above = 0;
  for (float v : t.values()) above += std::abs(v) >= 100.0f;

  const double n = double(t.size());
  const double f = 5e-6;
  double observed = double(above) / n;
  CHECK(observed >= 0.5 * f);
  CHECK(observed <= 1.5 * f);

  // Binomial sanity: within 5 standard deviations of the mean for n >= 1e7.
  REQUIRE(n >= 1e7);
  double mean = n * f;
  double sd = std::sqrt(n * f * (1 - f));
  CHECK(std::abs(double(above) - mean) <= 5 * sd);
}

TEST_CASE("tensor file format roundtrips and rejects corruption") {
  ActivationTensor t = synth_activations(5, 17, fig4_default_stats(), 3);
  auto bytes = tensor_to_bytes(t);
  CHECK(bytes.size() == 12 + 4 * t.size());
  CHECK(tensor_from_bytes(bytes).bit_equal(t));

  auto bad_magic = bytes;
  bad_magic[0] ^= 0xFF;
  CHECK_THROWS(tensor_from_bytes(bad_magic));

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS(tensor_from_bytes(truncated));
}
