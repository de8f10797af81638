#pragma once

#include <cstdint>

#include "splitwire/model_profile.hpp"

namespace splitwire {

// A deployment point in the split/quantization design space: split layer plus
// front/back weight and activation bit-widths.
struct QuantScheme {
  uint32_t split_layer = 1;  // ell_w in [1, L]
  uint32_t qw1 = 4;
  uint32_t qw2 = 16;
  uint32_t qa1 = 4;
  uint32_t qa2 = 16;

  void validate(const ModelProfile& profile) const;
};

// Optional quantization-metadata accounting for the weight footprint: every
// group_size parameters carry overhead_bytes of scales/zeros.
struct OpscOverhead {
  uint64_t bytes_per_group = 0;
  uint64_t group_size = 128;
};

// Activation bit-width at layer k (1-based): qa1 before the split layer, qa2
// from the split layer on.
uint32_t activation_bits_at(const QuantScheme& scheme, uint32_t layer);

// Weight memory footprint of the mixed-precision split model, in bits
// (front segment at qw1, back segment at qw2). Exact integer arithmetic.
uint64_t opsc_memory_bits(const ModelProfile& profile, const QuantScheme& scheme,
                          const OpscOverhead& overhead = {});
double opsc_memory_bytes(const ModelProfile& profile, const QuantScheme& scheme,
                         const OpscOverhead& overhead = {});

// KV-cache footprint in bits after generating token w with the split at
// layer ell: K/V for the new token on edge layers, K/V for the previous
// tokens buffered for the cloud layers, plus the transient hidden state.
// The second sum covers layers executed in the cloud yet is counted here,
// exactly as the formula is written.
uint64_t kv_cache_bits(uint32_t w, uint32_t ell, const ModelProfile& profile,
                       const QuantScheme& scheme);

// Intermediate-output size in bits: the full KV cache when i_kv = 1, only the
// split-layer hidden state otherwise.
uint64_t io_bits(uint32_t w, uint32_t ell, int i_kv, const ModelProfile& profile,
                 const QuantScheme& scheme);

// Total activation-bit precision: split_layer*qa1 + (L - split_layer)*qa2.
uint64_t psi(const ModelProfile& profile, const QuantScheme& scheme);

struct SizeReport {
  double weights_bytes = 0;
  uint64_t kv_bits = 0;
  uint64_t io_bits = 0;
  uint64_t psi = 0;
};

SizeReport size_report(uint32_t w, uint32_t ell, int i_kv, const ModelProfile& profile,
                       const QuantScheme& scheme);

}  // namespace splitwire
