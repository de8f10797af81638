#include "splitwire/tabq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace splitwire {

namespace {

// Round half away from zero, the deterministic rounding used everywhere.
int64_t round_away(double x) { return std::llround(x); }

}  // namespace

void TabqConfig::validate() const {
  if (q_min_bits < 2) throw std::invalid_argument("tabq: q_min_bits must be >= 2");
  if (q_min_bits > q_max_bits) throw std::invalid_argument("tabq: q_min_bits > q_max_bits");
  if (q_max_bits > 16) throw std::invalid_argument("tabq: q_max_bits must be <= 16");
  if (!(delta >= 0.0)) throw std::invalid_argument("tabq: delta must be >= 0");
}

AiqResult aiq(std::span<const float> values, uint32_t bits) {
  if (bits < 2) throw std::invalid_argument("aiq: bits must be >= 2");
  if (values.empty()) throw std::invalid_argument("aiq: empty input");

  float t_min = values[0];
  float t_max = values[0];
  for (float v : values) {
    if (!(v >= 0.0f) || !std::isfinite(v))
      throw std::invalid_argument("aiq: values must be finite and >= 0");
    t_min = std::min(t_min, v);
    t_max = std::max(t_max, v);
  }

  const uint32_t q_max = (1u << (bits - 1)) - 1;
  AiqResult res;
  res.codes.resize(values.size());

  if (t_max == t_min) {
    int64_t z = -round_away(t_min);
    if (z < std::numeric_limits<int32_t>::min() || z > std::numeric_limits<int32_t>::max())
      throw std::domain_error("aiq: zero point exceeds i32 range");
    res.scale = 1.0f;
    res.zero = static_cast<int32_t>(z);
    std::fill(res.codes.begin(), res.codes.end(), 0u);
    return res;
  }

  // Quantize with the f32-rounded scale that actually ships on the wire.
  res.scale = static_cast<float>((double(t_max) - double(t_min)) / double(q_max));
  const double s = res.scale;
  int64_t z = -round_away(double(t_min) / s);
  if (z < std::numeric_limits<int32_t>::min() || z > std::numeric_limits<int32_t>::max())
    throw std::domain_error("aiq: zero point exceeds i32 range");
  res.zero = static_cast<int32_t>(z);

  for (size_t i = 0; i < values.size(); ++i) {
    int64_t c = round_away(double(values[i]) / s + double(z));
    c = std::clamp<int64_t>(c, 0, q_max);
    res.codes[i] = static_cast<uint32_t>(c);
  }
  return res;
}

std::vector<uint8_t> pack_signs(std::span<const float> row) {
  std::vector<uint8_t> bitmap((row.size() + 7) / 8, 0);
  for (size_t i = 0; i < row.size(); ++i) {
    if (std::signbit(row[i])) bitmap[i >> 3] |= uint8_t(1u << (i & 7));
  }
  return bitmap;
}

namespace {

// Mean absolute gap between the rescaled reference codes (initial bit-width)
// and the candidate codes.
double distortion(const std::vector<uint32_t>& codes0, uint32_t bits0,
                  const std::vector<uint32_t>& codes_q, uint32_t bits_q) {
  const uint32_t shift = bits0 - bits_q;
  uint64_t acc = 0;
  for (size_t i = 0; i < codes0.size(); ++i) {
    int64_t ref = int64_t(codes0[i] >> shift);
    int64_t diff = ref - int64_t(codes_q[i]);
    acc += uint64_t(diff < 0 ? -diff : diff);
  }
  return double(acc) / double(codes0.size());
}

QuantRow finish(uint32_t bits, AiqResult&& q, std::vector<uint8_t>&& signs, size_t n) {
  QuantRow row;
  row.bits = bits;
  row.scale = q.scale;
  row.zero = q.zero;
  row.codes = std::move(q.codes);
  row.sign_bitmap = std::move(signs);
  row.count = static_cast<uint32_t>(n);
  return row;
}

}  // namespace

QuantRow tabq_row(std::span<const float> row, const TabqConfig& cfg) {
  cfg.validate();
  if (row.empty()) throw std::invalid_argument("tabq_row: empty row");

  std::vector<uint8_t> signs = pack_signs(row);
  std::vector<float> mags(row.size());
  for (size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i])) throw std::invalid_argument("tabq_row: non-finite value");
    mags[i] = std::abs(row[i]);
  }

  // One bit is reserved for the sign; a 2-bit total budget leaves no room for
  // the reduction loop, so the initial candidate is clamped at the floor.
  const uint32_t bits0 = std::max(cfg.q_max_bits - 1, cfg.q_min_bits);
  AiqResult initial = aiq(mags, bits0);

  AiqResult prev = initial;  // last tolerance-satisfying configuration
  uint32_t prev_bits = bits0;
  for (uint32_t q = bits0 - 1; q >= cfg.q_min_bits; --q) {
    AiqResult cand = aiq(mags, q);
    double delta = distortion(initial.codes, bits0, cand.codes, q);
    if (delta > cfg.delta) {
      if (cfg.literal_alg1) return finish(q, std::move(cand), std::move(signs), row.size());
      return finish(prev_bits, std::move(prev), std::move(signs), row.size());
    }
    prev = std::move(cand);
    prev_bits = q;
  }
  return finish(prev_bits, std::move(prev), std::move(signs), row.size());
}

std::vector<QuantRow> tabq_tensor(const ActivationTensor& below, const TabqConfig& cfg) {
  std::vector<QuantRow> rows;
  rows.reserve(below.rows());
  for (uint32_t r = 0; r < below.rows(); ++r) rows.push_back(tabq_row(below.row(r), cfg));
  return rows;
}

std::vector<float> dequantize(const QuantRow& q) {
  if (q.bits < 2 || q.bits > 16) throw std::invalid_argument("dequantize: bad bit-width");
  if (q.codes.size() != q.count) throw std::invalid_argument("dequantize: code count mismatch");
  const uint32_t q_max = q.q_max();
  std::vector<float> out(q.codes.size());
  for (size_t i = 0; i < q.codes.size(); ++i) {
    if (q.codes[i] > q_max) throw std::invalid_argument("dequantize: code exceeds Q_max");
    double mag = (double(q.codes[i]) - double(q.zero)) * double(q.scale);
    out[i] = static_cast<float>(q.sign_negative(static_cast<uint32_t>(i)) ? -mag : mag);
  }
  return out;
}

}  // namespace splitwire
