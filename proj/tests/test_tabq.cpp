#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "splitwire/tabq.hpp"

using namespace splitwire;

namespace {

// Reference distortion per the reduction-step check, reimplemented
// independently of the library.
double ref_delta(const std::vector<uint32_t>& ref_codes, uint32_t ref_bits,
                 const std::vector<uint32_t>& codes, uint32_t bits) {
  double acc = 0;
  for (size_t i = 0; i < ref_codes.size(); ++i) {
    double rescaled = std::floor(double(ref_codes[i]) / std::pow(2.0, double(ref_bits - bits)));
    acc += std::abs(rescaled - double(codes[i]));
  }
  return acc / double(ref_codes.size());
}

std::vector<float> magnitudes(std::span<const float> row) {
  std::vector<float> m(row.size());
  for (size_t i = 0; i < row.size(); ++i) m[i] = std::abs(row[i]);
  return m;
}

}  // namespace

TEST_CASE("aiq on grid-aligned values is exact") {
  AiqResult r = aiq(std::vector<float>{0, 1, 2, 3}, 3);
  CHECK(r.scale == 1.0f);
  CHECK(r.zero == 0);
  CHECK(r.codes == std::vector<uint32_t>{0, 1, 2, 3});
}

TEST_CASE("aiq hand evaluation for [1,5] at 2 bits") {
  AiqResult r = aiq(std::vector<float>{1, 5}, 2);
  CHECK(r.scale == 4.0f);
  CHECK(r.zero == 0);
  CHECK(r.codes == std::vector<uint32_t>{0, 1});
  // dequant: (0-0)*4 = 0, (1-0)*4 = 4; error <= scale
  CHECK(std::abs((0 - r.zero) * r.scale - 1.0f) <= r.scale);
  CHECK(std::abs((1 - r.zero) * r.scale - 5.0f) <= r.scale);
}

TEST_CASE("aiq degenerate constant input dequantizes exactly") {
  for (uint32_t bits : {2u, 3u, 8u}) {
    AiqResult r = aiq(std::vector<float>{5, 5, 5}, bits);
    CHECK(r.scale == 1.0f);
    CHECK(r.zero == -5);
    for (uint32_t c : r.codes) CHECK((double(c) - r.zero) * r.scale == 5.0);
  }
}

TEST_CASE("aiq input validation") {
  CHECK_THROWS_AS(aiq(std::vector<float>{1, 2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(aiq(std::vector<float>{-1, 2}, 3), std::invalid_argument);
  CHECK_THROWS_AS(aiq(std::vector<float>{}, 3), std::invalid_argument);
}

TEST_CASE("tabq_row with infinite tolerance hits the floor") {
  TabqConfig cfg{8, 2, 1e30, false};
  QuantRow q = tabq_row(std::vector<float>{0.3f, -1.7f, 2.9f, -0.1f}, cfg);
  CHECK(q.bits == 2);
}

TEST_CASE("tabq_row with zero tolerance keeps the initial bit-width") {
  // Hand trace at q_max 4: initial codes [0,1,2,3] at 3 bits (s=1, z=-4);
  // the 2-bit candidate gives [0,1,1,1] vs rescaled [0,0,1,1], delta 0.25 > 0.
  TabqConfig cfg{4, 2, 0.0, false};
  QuantRow q = tabq_row(std::vector<float>{4, 5, 6, 7}, cfg);
  CHECK(q.bits == 3);
  CHECK(q.scale == 1.0f);
  CHECK(q.zero == -4);
  CHECK(q.codes == std::vector<uint32_t>{0, 1, 2, 3});
}

TEST_CASE("literal mode returns the first violating configuration") {
  TabqConfig cfg{4, 2, 0.0, true};
  QuantRow q = tabq_row(std::vector<float>{4, 5, 6, 7}, cfg);
  CHECK(q.bits == 2);
  CHECK(q.scale == 3.0f);
  CHECK(q.zero == -1);
  CHECK(q.codes == std::vector<uint32_t>{0, 1, 1, 1});
}

TEST_CASE("a 2-bit total budget degenerates to a single candidate") {
  TabqConfig cfg{2, 2, 0.2, false};
  QuantRow q = tabq_row(std::vector<float>{0.5f, -3.0f}, cfg);
  CHECK(q.bits == 2);
  for (uint32_t c : q.codes) CHECK(c <= 1);
}

TEST_CASE("budget compliance: recomputed delta at Q* is within tolerance") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
  for (double delta : {0.0, 0.05, 0.2, 1.0}) {
    TabqConfig cfg{8, 2, delta, false};
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<float> row(32);
      for (auto& v : row) v = dist(rng);
      QuantRow q = tabq_row(row, cfg);
      if (q.bits == cfg.q_min_bits) continue;  // floor hit, no guarantee
      auto mags = magnitudes(row);
      AiqResult ref = aiq(mags, cfg.q_max_bits - 1);
      AiqResult at_q = aiq(mags, q.bits);
      CHECK(at_q.codes == q.codes);
      CHECK(ref_delta(ref.codes, cfg.q_max_bits - 1, at_q.codes, q.bits) <= delta);
    }
  }
}

TEST_CASE("reconstruction error is bounded by the row scale") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<float> dist(-50.0f, 50.0f);
  TabqConfig cfg{6, 2, 0.2, false};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> row(64);
    for (auto& v : row) v = dist(rng);
    QuantRow q = tabq_row(row, cfg);
    std::vector<float> rec = dequantize(q);
    for (size_t i = 0; i < row.size(); ++i) {
      CHECK(std::abs(double(row[i]) - double(rec[i])) <= double(q.scale));
      // sign never flips
      if (rec[i] != 0.0f) CHECK(std::signbit(rec[i]) == std::signbit(row[i]));
    }
    for (uint32_t c : q.codes) CHECK(c <= q.q_max());
  }
}

TEST_CASE("constant rows drop to fewer bits than high-variance rows") {
  std::vector<float> data(8, 2.0f);                                  // constant row
  for (int i = 0; i < 8; ++i) data.push_back(float(i * i) - 20.0f);  // spread out
  ActivationTensor t = make_tensor(2, 8, std::move(data));
  TabqConfig cfg{8, 2, 0.1, false};
  auto rows = tabq_tensor(t, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bits == cfg.q_min_bits);  // every reduction is free
  CHECK(rows[0].bits <= rows[1].bits);

  // Verify with the recomputed distortion at each level: constant rows give
  // identical all-zero codes at every bit-width.
  auto mags = magnitudes(t.row(0));
  for (uint32_t q = cfg.q_max_bits - 2; q >= cfg.q_min_bits; --q) {
    AiqResult ref = aiq(mags, cfg.q_max_bits - 1);
    AiqResult cand = aiq(mags, q);
    CHECK(ref_delta(ref.codes, cfg.q_max_bits - 1, cand.codes, q) == 0.0);
  }
}

TEST_CASE("single-row tensor equals tabq_row") {
  std::vector<float> row{0.4f, -2.0f, 1.5f, 0.0f};
  TabqConfig cfg{4, 2, 0.2, false};
  auto rows = tabq_tensor(make_tensor(1, 4, row), cfg);
  QuantRow direct = tabq_row(row, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].bits == direct.bits);
  CHECK(rows[0].codes == direct.codes);
  CHECK(rows[0].scale == direct.scale);
  CHECK(rows[0].zero == direct.zero);
}

TEST_CASE("all-zero tensor dequantizes to zeros via the degenerate path") {
  ActivationTensor t = make_tensor(3, 5, std::vector<float>(15, 0.0f));
  for (const QuantRow& q : tabq_tensor(t, TabqConfig{})) {
    for (float v : dequantize(q)) CHECK(v == 0.0f);
  }
}

TEST_CASE("tabq_row input validation") {
  CHECK_THROWS_AS(tabq_row(std::vector<float>{}, TabqConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(tabq_row(std::vector<float>{1.0f}, TabqConfig{4, 2, -0.5, false}),
                  std::invalid_argument);
  CHECK_THROWS_AS(tabq_row(std::vector<float>{1.0f}, TabqConfig{4, 1, 0.2, false}),
                  std::invalid_argument);
  CHECK_THROWS_AS(tabq_row(std::vector<float>{1.0f}, TabqConfig{18, 2, 0.2, false}),
                  std::invalid_argument);
}

TEST_CASE("signed pairs reconstruct symmetrically") {
  QuantRow q = tabq_row(std::vector<float>{-2.0f, 2.0f}, TabqConfig{});
  std::vector<float> rec = dequantize(q);
  CHECK(rec[0] == -rec[1]);
  CHECK(rec[1] >= 0.0f);
}

TEST_CASE("the default configuration matches the standard settings") {
  TabqConfig cfg;
  CHECK(cfg.q_max_bits == 4);
  CHECK(cfg.q_min_bits == 2);
  CHECK(cfg.delta == 0.2);
  CHECK_FALSE(cfg.literal_alg1);
}

TEST_CASE("dequantize rejects codes above Q_max") {
  QuantRow q;
  q.bits = 3;
  q.scale = 1.0f;
  q.zero = 0;
  q.codes = {7};  // Q_max at 3 bits is 3
  q.sign_bitmap = {0};
  q.count = 1;
  CHECK_THROWS_AS(dequantize(q), std::invalid_argument);
}
