#include "splitwire/threshold_split.hpp"

#include <cmath>
#include <stdexcept>

namespace splitwire {

SplitPair threshold_split(const ActivationTensor& t, float tau) {
  if (!(tau >= 0.0f)) throw std::invalid_argument("threshold_split: tau must be >= 0");

  SplitPair pair;
  pair.tau = tau;
  pair.above.rows = t.rows();
  pair.above.cols = t.cols();
  pair.above.row_ptr.reserve(size_t(t.rows()) + 1);
  pair.above.row_ptr.push_back(0);

  std::vector<float> below(t.size());
  for (uint32_t r = 0; r < t.rows(); ++r) {
    for (uint32_t c = 0; c < t.cols(); ++c) {
      float v = t.at(r, c);
      if (std::abs(v) >= tau) {
        pair.above.col_idx.push_back(c);
        pair.above.values.push_back(v);
        below[size_t(r) * t.cols() + c] = 0.0f;
      } else {
        below[size_t(r) * t.cols() + c] = v;
      }
    }
    pair.above.row_ptr.push_back(static_cast<uint32_t>(pair.above.values.size()));
  }
  pair.below = ActivationTensor(t.rows(), t.cols(), std::move(below));
  return pair;
}

ActivationTensor merge(const SplitPair& pair) {
  pair.above.validate();
  if (pair.above.rows != pair.below.rows() || pair.above.cols != pair.below.cols())
    throw std::invalid_argument("merge: dimension mismatch between above and below");

  // Supports are disjoint, so assignment equals addition and preserves the
  // sign of zero.
  std::vector<float> data(pair.below.values().begin(), pair.below.values().end());
  for (uint32_t r = 0; r < pair.above.rows; ++r) {
    for (uint32_t k = pair.above.row_ptr[r]; k < pair.above.row_ptr[r + 1]; ++k) {
      data[size_t(r) * pair.above.cols + pair.above.col_idx[k]] = pair.above.values[k];
    }
  }
  return ActivationTensor(pair.below.rows(), pair.below.cols(), std::move(data));
}

}  // namespace splitwire
