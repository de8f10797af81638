#include "splitwire/csr.hpp"

#include <cmath>
#include <stdexcept>

namespace splitwire {

void CsrMatrix::validate() const {
  if (cols == 0) throw std::runtime_error("csr: cols must be > 0");
  if (row_ptr.size() != size_t(rows) + 1) throw std::runtime_error("csr: row_ptr length mismatch");
  if (row_ptr.front() != 0) throw std::runtime_error("csr: row_ptr[0] must be 0");
  if (row_ptr.back() != values.size() || col_idx.size() != values.size())
    throw std::runtime_error("csr: nnz mismatch between row_ptr, col_idx and values");
  for (size_t i = 1; i < row_ptr.size(); ++i) {
    if (row_ptr[i] < row_ptr[i - 1]) throw std::runtime_error("csr: row_ptr not monotone");
  }
  for (uint32_t r = 0; r < rows; ++r) {
    for (uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= cols) throw std::runtime_error("csr: column index out of range");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
        throw std::runtime_error("csr: column indices not strictly increasing within row");
    }
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw std::runtime_error("csr: non-finite value");
  }
}

CsrMatrix csr_encode(const ActivationTensor& dense) {
  CsrMatrix csr;
  csr.rows = dense.rows();
  csr.cols = dense.cols();
  csr.row_ptr.reserve(size_t(csr.rows) + 1);
  csr.row_ptr.push_back(0);
  for (uint32_t r = 0; r < csr.rows; ++r) {
    for (uint32_t c = 0; c < csr.cols; ++c) {
      float v = dense.at(r, c);
      if (v != 0.0f) {
        csr.col_idx.push_back(c);
        csr.values.push_back(v);
      }
    }
    csr.row_ptr.push_back(static_cast<uint32_t>(csr.values.size()));
  }
  return csr;
}

ActivationTensor csr_decode(const CsrMatrix& csr) {
  csr.validate();
  std::vector<float> data(size_t(csr.rows) * csr.cols, 0.0f);
  for (uint32_t r = 0; r < csr.rows; ++r) {
    for (uint32_t k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k) {
      data[size_t(r) * csr.cols + csr.col_idx[k]] = csr.values[k];
    }
  }
  return ActivationTensor(csr.rows, csr.cols, std::move(data));
}

void csr_write(wire::Writer& w, const CsrMatrix& csr) {
  w.u32(csr.nnz());
  for (uint32_t p : csr.row_ptr) w.u32(p);
  for (uint32_t c : csr.col_idx) w.u32(c);
  for (float v : csr.values) w.f32(v);
}

CsrMatrix csr_read(wire::Reader& r, uint32_t rows, uint32_t cols) {
  CsrMatrix csr;
  csr.rows = rows;
  csr.cols = cols;
  uint32_t nnz = r.u32();
  csr.row_ptr.resize(size_t(rows) + 1);
  for (auto& p : csr.row_ptr) p = r.u32();
  csr.col_idx.resize(nnz);
  for (auto& c : csr.col_idx) c = r.u32();
  csr.values.resize(nnz);
  for (auto& v : csr.values) v = r.f32();
  csr.validate();
  return csr;
}

}  // namespace splitwire
