#pragma once

#include <cstdint>
#include <vector>

namespace splitwire {

// Static description of the model being split: decoder stack depth, attention
// geometry, per-layer parameter counts, and the bit-width menus the planner
// may draw from.
struct ModelProfile {
  uint32_t num_layers = 0;
  uint32_t heads = 0;
  uint32_t head_dim = 0;
  std::vector<uint64_t> params_per_layer;
  std::vector<uint32_t> weight_bit_menu;
  std::vector<uint32_t> activation_bit_menu;

  uint64_t hidden_width() const { return uint64_t(heads) * head_dim; }
  void validate() const;
};

// 32-layer decoder stack, 32 heads x 128. Per-layer parameters count the
// attention projections, gated MLP, and norms of one decoder layer;
// embedding/unembedding are excluded (the decoder stack is what gets split).
ModelProfile llama2_7b_profile();
// 40-layer decoder stack, 40 heads x 128.
ModelProfile llama2_13b_profile();

}  // namespace splitwire
