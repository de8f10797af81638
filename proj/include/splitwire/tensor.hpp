#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace splitwire {

// Dense row-major activation slice. Rows are tokens, columns span the hidden
// width (heads x head_dim). Immutable after construction; values are finite
// 32-bit floats.
class ActivationTensor {
 public:
  ActivationTensor() = default;
  ActivationTensor(uint32_t rows, uint32_t cols, std::vector<float> data);

  uint32_t rows() const { return rows_; }
  uint32_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  float at(uint32_t r, uint32_t c) const { return data_[size_t(r) * cols_ + c]; }
  std::span<const float> row(uint32_t r) const {
    return std::span<const float>(data_).subspan(size_t(r) * cols_, cols_);
  }
  std::span<const float> values() const { return data_; }

  // Bitwise comparison (distinguishes -0.0 from 0.0).
  bool bit_equal(const ActivationTensor& other) const;

 private:
  uint32_t rows_ = 0;
  uint32_t cols_ = 0;
  std::vector<float> data_;
};

ActivationTensor make_tensor(uint32_t rows, uint32_t cols, std::vector<float> values);

// Shape of the synthetic activation distribution: a heavy-tailed bulk below
// the outlier cutoff plus a small fraction of uniform [threshold, 2*threshold)
// outliers with random sign.
struct OutlierStats {
  float outlier_threshold = 100.0f;
  double outlier_fraction = 5e-6;
  float bulk_scale = 0.5f;

  void validate() const;
};

// Calibrated so that tau sweeps over {1,5,10} reproduce the published
// outlier-share behaviour (fraction/threshold from the measured histogram,
// bulk dispersion is a free knob).
OutlierStats fig4_default_stats();

// Deterministic given (dims, stats, seed). Bulk values are Laplace(0, bulk_scale)
// resampled to stay strictly below the threshold, so the observed outlier count
// is exactly binomial(rows*cols, outlier_fraction).
ActivationTensor synth_activations(uint32_t rows, uint32_t cols, const OutlierStats& stats,
                                   uint64_t seed);

// "SWT1" file format: magic, u32 rows, u32 cols, f32 data row-major, little-endian.
std::vector<uint8_t> tensor_to_bytes(const ActivationTensor& t);
ActivationTensor tensor_from_bytes(std::span<const uint8_t> bytes);
void save_tensor(const std::string& path, const ActivationTensor& t);
ActivationTensor load_tensor(const std::string& path);

}  // namespace splitwire
