#include "splitwire/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "splitwire/wire.hpp"

namespace splitwire {

namespace {

constexpr char kTensorMagic[4] = {'S', 'W', 'T', '1'};

// Uniform double in (0, 1), built from the engine's specified bit stream so
// results are identical across standard library implementations.
double next_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

ActivationTensor::ActivationTensor(uint32_t rows, uint32_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (cols_ == 0) throw std::invalid_argument("tensor: cols must be > 0");
  if (data_.size() != size_t(rows_) * cols_)
    throw std::invalid_argument("tensor: data length does not match rows*cols");
  for (float v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("tensor: values must be finite");
  }
}

bool ActivationTensor::bit_equal(const ActivationTensor& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  if (data_.empty()) return other.data_.empty();
  return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

ActivationTensor make_tensor(uint32_t rows, uint32_t cols, std::vector<float> values) {
  return ActivationTensor(rows, cols, std::move(values));
}

void OutlierStats::validate() const {
  if (!(outlier_threshold > 0)) throw std::invalid_argument("stats: outlier_threshold must be > 0");
  if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0))
    throw std::invalid_argument("stats: outlier_fraction must be in [0,1]");
  if (!(bulk_scale >= 0)) throw std::invalid_argument("stats: bulk_scale must be >= 0");
}

OutlierStats fig4_default_stats() { return OutlierStats{100.0f, 5e-6, 0.5f}; }

ActivationTensor synth_activations(uint32_t rows, uint32_t cols, const OutlierStats& stats,
                                   uint64_t seed) {
  stats.validate();
  if (rows == 0 || cols == 0) throw std::invalid_argument("synth: zero-size tensor request");

  std::mt19937_64 rng(seed);
  const double b = stats.bulk_scale;
  const float tau = stats.outlier_threshold;

  std::vector<float> data(size_t(rows) * cols);
  for (float& out : data) {
    if (next_unit(rng) < stats.outlier_fraction) {
      double mag = double(tau) * (1.0 + next_unit(rng));
      double sgn = next_unit(rng) < 0.5 ? -1.0 : 1.0;
      out = static_cast<float>(sgn * mag);
    } else if (b == 0.0) {
      out = 0.0f;
    } else {
      // Laplace(0, b) via inverse CDF, resampled until strictly sub-threshold.
      float v;
      do {
        double u = next_unit(rng) - 0.5;
        double s = u < 0 ? -1.0 : 1.0;
        v = static_cast<float>(-b * s * std::log(1.0 - 2.0 * std::abs(u)));
      } while (std::abs(v) >= tau);
      out = v;
    }
  }
  return ActivationTensor(rows, cols, std::move(data));
}

std::vector<uint8_t> tensor_to_bytes(const ActivationTensor& t) {
  wire::Writer w;
  for (char c : kTensorMagic) w.u8(static_cast<uint8_t>(c));
  w.u32(t.rows());
  w.u32(t.cols());
  for (float v : t.values()) w.f32(v);
  return w.take();
}

ActivationTensor tensor_from_bytes(std::span<const uint8_t> bytes) {
  wire::Reader r(bytes);
  for (char c : kTensorMagic) {
    if (r.u8() != static_cast<uint8_t>(c)) throw std::runtime_error("tensor: bad magic");
  }
  uint32_t rows = r.u32();
  uint32_t cols = r.u32();
  if (cols == 0) throw std::runtime_error("tensor: cols must be > 0");
  if (r.remaining() != size_t(rows) * cols * 4) throw std::runtime_error("tensor: size mismatch");
  std::vector<float> data(size_t(rows) * cols);
  for (float& v : data) {
    v = r.f32();
    if (!std::isfinite(v)) throw std::runtime_error("tensor: non-finite value");
  }
  return ActivationTensor(rows, cols, std::move(data));
}

void save_tensor(const std::string& path, const ActivationTensor& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  auto bytes = tensor_to_bytes(t);
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

ActivationTensor load_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return tensor_from_bytes(bytes);
}

}  // namespace splitwire
