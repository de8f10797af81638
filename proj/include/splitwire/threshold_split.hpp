#pragma once

#include "splitwire/csr.hpp"
#include "splitwire/tensor.hpp"

namespace splitwire {

// Result of threshold splitting: the sparse outlier part (|t| >= tau, exact
// values) and the dense sub-threshold remainder. Supports are disjoint and
// above + below reconstructs the input bit-exactly.
struct SplitPair {
  CsrMatrix above;
  ActivationTensor below;
  float tau = 0.0f;
};

// Splits on |t[i,j]| >= tau. Ties go to the outlier part. At tau = 0 every
// element (including zeros) is stored in the CSR part and below is all-zero.
SplitPair threshold_split(const ActivationTensor& t, float tau);

ActivationTensor merge(const SplitPair& pair);

}  // namespace splitwire
