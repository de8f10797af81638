#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splitwire/channel.hpp"
#include "splitwire/resource_model.hpp"
#include "splitwire/tabq.hpp"
#include "splitwire/tensor.hpp"

namespace splitwire {

// Local compute latency L_c(w): affine a + b*w, or a piecewise-linear table
// of (tokens, seconds) points with constant extension beyond the ends.
struct ComputeProfile {
  double affine_a = 0.0;
  double affine_b = 0.0;
  std::vector<std::pair<uint32_t, double>> table;  // empty -> affine model

  double latency_s(uint32_t tokens) const;
  void validate() const;
};

struct LatencyBudget {
  double deadline_s = 1.0;  // D

  void validate() const;
};

enum class SizeSource {
  kAnalytic,  // io_bits scaled by a measured compression ratio
  kMeasured,  // actual payload sizes on synthetic activations
};

// Compression ratio of the two-stage pipeline relative to the Q_a-bit
// intermediate-output accounting, measured on the default synthetic preset
// at tau=5, q_max=4, delta=0.2.
inline constexpr double kDefaultCompressionRatio = 0.30;

struct ExitDecision {
  uint32_t tokens_sent = 0;  // w*
  uint32_t exit_layer = 0;   // ell
  int i_kv = 1;
  uint64_t payload_bits = 0;
  double total_latency_s = 0.0;
  uint64_t depth = 0;  // w* * ell
};

class BudgetUnsatisfiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EarlyExitInputs {
  ModelProfile profile;
  QuantScheme scheme;
  uint32_t max_tokens = 1;  // W-bar
  LatencyBudget budget;
  ComputeProfile compute;
  ChannelParams channel;
  RateMode rate_mode = RateMode::kDirect;
  SizeSource size_source = SizeSource::kAnalytic;
  double compression_ratio = kDefaultCompressionRatio;
  // Measured-size mode settings.
  float tau = 5.0f;
  TabqConfig tabq{};
  OutlierStats synth_stats = fig4_default_stats();
  uint64_t seed = 0;

  void validate() const;
};

// Eq.-style total latency: local compute plus epsilon-outage transmission of
// the intermediate output. w = 0 transmits nothing.
double total_latency(uint32_t w, uint32_t ell, const QuantScheme& scheme, int i_kv, double rate,
                     const ModelProfile& profile, const ComputeProfile& compute,
                     const ChannelParams& channel);

// Computes payload sizes for the simulator; caches measured compressions of
// synthetic slices keyed by (rows, activation bits). Not thread-safe: share
// across runs sequentially or give each thread its own.
class PayloadSizer {
 public:
  explicit PayloadSizer(const EarlyExitInputs& inputs) : in_(inputs) {}

  uint64_t raw_bits(uint32_t w, uint32_t ell, int i_kv) const;
  uint64_t compressed_bits(uint32_t w, uint32_t ell, int i_kv);

 private:
  uint64_t measured_slice_bits(uint32_t rows, uint32_t activation_bits);

  const EarlyExitInputs& in_;
  std::map<std::pair<uint32_t, uint32_t>, uint64_t> cache_;
};

// Greedy deadline-driven search over (token, layer) depth with progressive
// fallbacks: compress the intermediate output, then drop the KV cache, then
// shed tokens. Throws BudgetUnsatisfiable when even the smallest compressed
// transfer misses the deadline.
ExitDecision early_exit(const EarlyExitInputs& inputs);

// Variant reusing a caller-owned sizer, so simulations that differ only in
// deadline or token cap (e.g. per-device runs) share the measured-slice cache.
ExitDecision early_exit(const EarlyExitInputs& inputs, PayloadSizer& sizer);

struct OffloadAccounting {
  uint64_t edge_tokens = 0;
  uint64_t server_tokens = 0;
};

// Token bookkeeping for a request of request_tokens total: the edge covers
// tokens_sent, the server generates the remainder.
OffloadAccounting offload_accounting(const ExitDecision& decision, uint64_t request_tokens);

}  // namespace splitwire
