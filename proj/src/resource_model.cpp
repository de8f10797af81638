#include "splitwire/resource_model.hpp"

#include <stdexcept>

namespace splitwire {

void QuantScheme::validate(const ModelProfile& profile) const {
  profile.validate();
  if (split_layer < 1 || split_layer > profile.num_layers)
    throw std::invalid_argument("scheme: split_layer out of [1, L]");
  auto in_menu = [](const std::vector<uint32_t>& menu, uint32_t b) {
    for (uint32_t m : menu) {
      if (m == b) return true;
    }
    return false;
  };
  if (!in_menu(profile.weight_bit_menu, qw1) || !in_menu(profile.weight_bit_menu, qw2))
    throw std::invalid_argument("scheme: weight bits not in profile menu");
  if (!in_menu(profile.activation_bit_menu, qa1) || !in_menu(profile.activation_bit_menu, qa2))
    throw std::invalid_argument("scheme: activation bits not in profile menu");
}

uint32_t activation_bits_at(const QuantScheme& scheme, uint32_t layer) {
  return layer < scheme.split_layer ? scheme.qa1 : scheme.qa2;
}

uint64_t opsc_memory_bits(const ModelProfile& profile, const QuantScheme& scheme,
                          const OpscOverhead& overhead) {
  if (scheme.split_layer < 1 || scheme.split_layer > profile.num_layers)
    throw std::invalid_argument("opsc_memory: split_layer out of [1, L]");
  uint64_t bits = 0;
  for (uint32_t i = 1; i <= profile.num_layers; ++i) {
    uint64_t params = profile.params_per_layer[i - 1];
    bits += params * (i <= scheme.split_layer ? scheme.qw1 : scheme.qw2);
    if (overhead.bytes_per_group > 0) {
      uint64_t groups = (params + overhead.group_size - 1) / overhead.group_size;
      bits += groups * overhead.bytes_per_group * 8;
    }
  }
  return bits;
}

double opsc_memory_bytes(const ModelProfile& profile, const QuantScheme& scheme,
                         const OpscOverhead& overhead) {
  return double(opsc_memory_bits(profile, scheme, overhead)) / 8.0;
}

uint64_t kv_cache_bits(uint32_t w, uint32_t ell, const ModelProfile& profile,
                       const QuantScheme& scheme) {
  if (w < 1) throw std::invalid_argument("kv_cache_bits: w must be >= 1");
  if (ell < 1 || ell > profile.num_layers)
    throw std::invalid_argument("kv_cache_bits: layer out of [1, L]");

  const uint64_t hd = profile.hidden_width();
  const uint64_t t_w = uint64_t(w) * hd;
  const uint64_t t_prev = uint64_t(w - 1) * hd;

  uint64_t bits = 0;
  for (uint32_t k = 1; k <= ell; ++k) bits += 2 * t_w * activation_bits_at(scheme, k);
  for (uint32_t k = ell + 1; k <= profile.num_layers; ++k)
    bits += 2 * t_prev * activation_bits_at(scheme, k);
  bits += hd * activation_bits_at(scheme, ell);
  return bits;
}

uint64_t io_bits(uint32_t w, uint32_t ell, int i_kv, const ModelProfile& profile,
                 const QuantScheme& scheme) {
  if (i_kv != 0 && i_kv != 1) throw std::invalid_argument("io_bits: i_kv must be 0 or 1");
  if (i_kv == 1) return kv_cache_bits(w, ell, profile, scheme);
  if (w < 1) throw std::invalid_argument("io_bits: w must be >= 1");
  if (ell < 1 || ell > profile.num_layers)
    throw std::invalid_argument("io_bits: layer out of [1, L]");
  return uint64_t(w) * profile.hidden_width() * activation_bits_at(scheme, ell);
}

uint64_t psi(const ModelProfile& profile, const QuantScheme& scheme) {
  if (scheme.split_layer < 1 || scheme.split_layer > profile.num_layers)
    throw std::invalid_argument("psi: split_layer out of [1, L]");
  return uint64_t(scheme.split_layer) * scheme.qa1 +
         uint64_t(profile.num_layers - scheme.split_layer) * scheme.qa2;
}

SizeReport size_report(uint32_t w, uint32_t ell, int i_kv, const ModelProfile& profile,
                       const QuantScheme& scheme) {
  SizeReport r;
  r.weights_bytes = opsc_memory_bytes(profile, scheme);
  r.kv_bits = kv_cache_bits(w, ell, profile, scheme);
  r.io_bits = io_bits(w, ell, i_kv, profile, scheme);
  r.psi = psi(profile, scheme);
  return r;
}

}  // namespace splitwire
