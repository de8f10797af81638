#pragma once

#include <cstdint>
#include <vector>

#include "splitwire/tensor.hpp"
#include "splitwire/wire.hpp"

namespace splitwire {

// Compressed sparse row matrix storing exact f32 values. Column indices are
// strictly increasing within a row.
struct CsrMatrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<uint32_t> row_ptr;  // rows+1 entries, monotone non-decreasing
  std::vector<uint32_t> col_idx;
  std::vector<float> values;

  uint32_t nnz() const { return static_cast<uint32_t>(values.size()); }
  void validate() const;

  // Serialized length: u32 nnz + u32 row_ptr[rows+1] + (u32 col + f32 value) per entry.
  size_t wire_size_bytes() const { return 4 + 4 * (size_t(rows) + 1) + 8 * size_t(nnz()); }
};

// Encodes a dense matrix, dropping exact zeros.
CsrMatrix csr_encode(const ActivationTensor& dense);
ActivationTensor csr_decode(const CsrMatrix& csr);

void csr_write(wire::Writer& w, const CsrMatrix& csr);
CsrMatrix csr_read(wire::Reader& r, uint32_t rows, uint32_t cols);

}  // namespace splitwire
