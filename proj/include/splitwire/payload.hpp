#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "splitwire/csr.hpp"
#include "splitwire/rans.hpp"
#include "splitwire/tabq.hpp"
#include "splitwire/tensor.hpp"

namespace splitwire {

// Payload header fields other than shape. cols = heads * head_dim must match
// the compressed tensor.
struct PayloadMeta {
  uint8_t version = 1;
  bool kv_slice = false;  // flags bit 0
  uint16_t layer = 0;
  uint16_t heads = 1;
  uint16_t head_dim = 0;
};

// One quantized token row as it travels: scalar quantization parameters,
// sign bitmap, and the entropy-coded magnitude codes.
struct RowRecord {
  uint32_t bits = 0;
  float scale = 1.0f;
  int32_t zero = 0;
  std::vector<uint8_t> sign_bitmap;
  RansStream stream;
};

// "SWP1" wire object: 24-byte header, CSR-coded outlier part, per-row
// quantized bulk records.
struct CompressedPayload {
  PayloadMeta meta;
  uint32_t rows = 0;
  float tau = 0.0f;
  CsrMatrix above;
  std::vector<RowRecord> row_records;

  uint32_t cols() const { return uint32_t(meta.heads) * meta.head_dim; }

  static constexpr size_t kHeaderBytes = 24;
  size_t size_bytes() const;        // exact serialized length
  size_t above_bytes() const;       // CSR block share
  size_t below_bytes() const;       // row-record share

  // Reconstructs the per-row QuantRow (decodes the rANS stream).
  QuantRow quant_row(uint32_t r) const;
};

// Edge-side pipeline: threshold split -> CSR outliers -> token-wise adaptive
// quantization -> rANS coding of the codes.
CompressedPayload compress(const ActivationTensor& t, float tau, const TabqConfig& cfg,
                           const PayloadMeta& meta);

// Cloud-side restore: dequantized bulk plus exact outliers.
ActivationTensor decompress(const CompressedPayload& p);

size_t payload_size_bytes(const CompressedPayload& p);

// Size of the equivalent uncompressed transfer (raw SWT1 tensor file).
size_t baseline_size_bytes(uint32_t rows, uint32_t cols);

std::vector<uint8_t> payload_to_bytes(const CompressedPayload& p);
CompressedPayload payload_from_bytes(std::span<const uint8_t> bytes);
void save_payload(const std::string& path, const CompressedPayload& p);
CompressedPayload load_payload(const std::string& path);

}  // namespace splitwire
