#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splitwire/tensor.hpp"

namespace splitwire {

// Token-wise adaptive bit quantization settings. q_max_bits is the total bit
// budget per element including the sign bit; magnitudes are quantized at
// descending bit-widths until the distortion tolerance binds or the floor
// q_min_bits is reached.
struct TabqConfig {
  uint32_t q_max_bits = 4;
  uint32_t q_min_bits = 2;
  double delta = 0.2;
  // Reproduces the return-on-violation behaviour of the published procedure
  // instead of returning the last tolerance-satisfying bit-width.
  bool literal_alg1 = false;

  void validate() const;
};

struct AiqResult {
  std::vector<uint32_t> codes;  // in [0, 2^(bits-1) - 1]
  float scale = 1.0f;
  int32_t zero = 0;
};

// Asymmetric integer quantization of non-negative values at the given bit
// count: codes = clamp(round(v/s + z), 0, 2^(bits-1)-1). A constant input
// degenerates to scale 1 / zero -round(value) and all-zero codes.
AiqResult aiq(std::span<const float> values, uint32_t bits);

// One quantized token row: sign bits plus entropy-codable magnitude codes.
struct QuantRow {
  uint32_t bits = 0;  // selected bit-width Q*
  float scale = 1.0f;
  int32_t zero = 0;
  std::vector<uint32_t> codes;
  std::vector<uint8_t> sign_bitmap;  // bit j of byte j/8, set = negative
  uint32_t count = 0;

  uint32_t q_max() const { return (1u << (bits - 1)) - 1; }
  bool sign_negative(uint32_t i) const { return (sign_bitmap[i >> 3] >> (i & 7)) & 1; }
};

std::vector<uint8_t> pack_signs(std::span<const float> row);

QuantRow tabq_row(std::span<const float> row, const TabqConfig& cfg);

// Rows are quantized independently; per-token bit-widths may differ.
std::vector<QuantRow> tabq_tensor(const ActivationTensor& below, const TabqConfig& cfg);

// Cloud-side restore: signs * (codes - zero) * scale.
std::vector<float> dequantize(const QuantRow& q);

}  // namespace splitwire
