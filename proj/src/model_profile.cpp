#include "splitwire/model_profile.hpp"

#include <stdexcept>

namespace splitwire {

void ModelProfile::validate() const {
  if (num_layers == 0) throw std::invalid_argument("profile: num_layers must be > 0");
  if (heads == 0) throw std::invalid_argument("profile: heads must be > 0");
  if (head_dim == 0) throw std::invalid_argument("profile: head_dim must be > 0");
  if (params_per_layer.size() != num_layers)
    throw std::invalid_argument("profile: params_per_layer must have num_layers entries");
  for (uint64_t p : params_per_layer) {
    if (p == 0) throw std::invalid_argument("profile: params_per_layer entries must be > 0");
  }
  auto check_menu = [](const std::vector<uint32_t>& menu, const char* name) {
    if (menu.empty()) throw std::invalid_argument(std::string("profile: ") + name + " is empty");
    uint32_t prev = 0;
    for (uint32_t b : menu) {
      if (b < 1 || b > 32)
        throw std::invalid_argument(std::string("profile: ") + name + " values must be in [1,32]");
      if (b <= prev)
        throw std::invalid_argument(std::string("profile: ") + name +
                                    " must be strictly increasing");
      prev = b;
    }
  };
  check_menu(weight_bit_menu, "weight_bit_menu");
  check_menu(activation_bit_menu, "activation_bit_menu");
}

namespace {

ModelProfile uniform_profile(uint32_t layers, uint32_t heads, uint32_t head_dim,
                             uint64_t params_per_layer) {
  ModelProfile p;
  p.num_layers = layers;
  p.heads = heads;
  p.head_dim = head_dim;
  p.params_per_layer.assign(layers, params_per_layer);
  p.weight_bit_menu = {4, 8, 16};
  p.activation_bit_menu = {2, 3, 4, 8, 16};
  return p;
}

}  // namespace

ModelProfile llama2_7b_profile() {
  // hidden 4096, ffn 11008: 4*4096^2 + 3*4096*11008 + 2*4096
  return uniform_profile(32, 32, 128, 202'383'360);
}

ModelProfile llama2_13b_profile() {
  // hidden 5120, ffn 13824: 4*5120^2 + 3*5120*13824 + 2*5120
  return uniform_profile(40, 40, 128, 317'204'480);
}

}  // namespace splitwire
