#include "splitwire/early_exit.hpp"

#include <algorithm>
#include <cmath>

#include "splitwire/payload.hpp"

namespace splitwire {

double ComputeProfile::latency_s(uint32_t tokens) const {
  if (table.empty()) return affine_a + affine_b * double(tokens);
  if (tokens <= table.front().first) return table.front().second;
  if (tokens >= table.back().first) return table.back().second;
  for (size_t i = 1; i < table.size(); ++i) {
    if (tokens <= table[i].first) {
      auto [w0, l0] = table[i - 1];
      auto [w1, l1] = table[i];
      double f = double(tokens - w0) / double(w1 - w0);
      return l0 + f * (l1 - l0);
    }
  }
  return table.back().second;
}

void ComputeProfile::validate() const {
  if (table.empty()) {
    if (!(affine_a >= 0.0) || !(affine_b >= 0.0))
      throw std::invalid_argument("compute profile: affine coefficients must be >= 0");
    return;
  }
  uint32_t prev_w = 0;
  double prev_l = -1.0;
  bool first = true;
  for (auto [w, l] : table) {
    if (!first && w <= prev_w)
      throw std::invalid_argument("compute profile: table tokens must be strictly increasing");
    if (!(l >= 0.0)) throw std::invalid_argument("compute profile: latencies must be >= 0");
    if (l < prev_l) throw std::invalid_argument("compute profile: latencies must be non-decreasing");
    prev_w = w;
    prev_l = l;
    first = false;
  }
}

void LatencyBudget::validate() const {
  if (!(deadline_s > 0.0)) throw std::invalid_argument("budget: deadline must be > 0");
}

void EarlyExitInputs::validate() const {
  scheme.validate(profile);
  if (max_tokens < 1) throw std::invalid_argument("early exit: max_tokens must be >= 1");
  budget.validate();
  compute.validate();
  channel.validate();
  if (size_source == SizeSource::kAnalytic &&
      !(compression_ratio > 0.0 && compression_ratio <= 1.0))
    throw std::invalid_argument("early exit: compression ratio must be in (0,1]");
  if (size_source == SizeSource::kMeasured &&
      (profile.heads > 0xFFFF || profile.head_dim > 0xFFFF))
    throw std::invalid_argument("early exit: measured sizing needs heads and head_dim <= 65535");
  tabq.validate();
  synth_stats.validate();
}

double total_latency(uint32_t w, uint32_t ell, const QuantScheme& scheme, int i_kv, double rate,
                     const ModelProfile& profile, const ComputeProfile& compute,
                     const ChannelParams& channel) {
  double local = compute.latency_s(w);
  if (w == 0) return local;  // nothing to transmit
  uint64_t bits = io_bits(w, ell, i_kv, profile, scheme);
  return local + epsilon_latency(double(bits), rate, channel);
}

uint64_t PayloadSizer::raw_bits(uint32_t w, uint32_t ell, int i_kv) const {
  if (w == 0) return 0;
  return io_bits(w, ell, i_kv, in_.profile, in_.scheme);
}

uint64_t PayloadSizer::measured_slice_bits(uint32_t rows, uint32_t activation_bits) {
  if (rows == 0) return 0;
  auto key = std::make_pair(rows, activation_bits);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  // Each distinct row count gets its own deterministic synthetic slice.
  uint64_t slice_seed = in_.seed * 0x9E3779B97F4A7C15ull + rows;
  uint32_t cols32 = static_cast<uint32_t>(in_.profile.hidden_width());
  ActivationTensor slice = synth_activations(rows, cols32, in_.synth_stats, slice_seed);

  TabqConfig cfg = in_.tabq;
  cfg.q_max_bits = std::clamp<uint32_t>(activation_bits, 2, 16);
  cfg.q_min_bits = std::min(cfg.q_min_bits, cfg.q_max_bits);

  PayloadMeta meta;
  meta.heads = static_cast<uint16_t>(in_.profile.heads);
  meta.head_dim = static_cast<uint16_t>(in_.profile.head_dim);
  uint64_t bits = 8 * uint64_t(compress(slice, in_.tau, cfg, meta).size_bytes());
  cache_.emplace(key, bits);
  return bits;
}

uint64_t PayloadSizer::compressed_bits(uint32_t w, uint32_t ell, int i_kv) {
  if (w == 0) return 0;
  if (in_.size_source == SizeSource::kAnalytic) {
    return static_cast<uint64_t>(std::ceil(double(raw_bits(w, ell, i_kv)) * in_.compression_ratio));
  }

  const QuantScheme& s = in_.scheme;
  if (i_kv == 0) return measured_slice_bits(w, activation_bits_at(s, ell));

  // KV bundle: K and V slices per layer (w rows on edge layers, w-1 buffered
  // for cloud layers) plus the split-layer hidden state row.
  uint64_t bits = 0;
  for (uint32_t k = 1; k <= ell; ++k) bits += 2 * measured_slice_bits(w, activation_bits_at(s, k));
  for (uint32_t k = ell + 1; k <= in_.profile.num_layers; ++k)
    bits += 2 * measured_slice_bits(w - 1, activation_bits_at(s, k));
  bits += measured_slice_bits(1, activation_bits_at(s, ell));
  return bits;
}

namespace {

struct LatencyEval {
  double rate;
  const EarlyExitInputs& in;

  double at(uint32_t w, uint64_t payload_bits) const {
    double local = in.compute.latency_s(w);
    if (payload_bits == 0) return local;
    return local + epsilon_latency(double(payload_bits), rate, in.channel);
  }
};

ExitDecision make_decision(uint32_t w, uint32_t ell, int i_kv, uint64_t bits, double latency) {
  ExitDecision d;
  d.tokens_sent = w;
  d.exit_layer = ell;
  d.i_kv = i_kv;
  d.payload_bits = bits;
  d.total_latency_s = latency;
  d.depth = uint64_t(w) * ell;
  return d;
}

}  // namespace

ExitDecision early_exit(const EarlyExitInputs& inputs) {
  PayloadSizer sizer(inputs);
  return early_exit(inputs, sizer);
}

ExitDecision early_exit(const EarlyExitInputs& inputs, PayloadSizer& sizer) {
  inputs.validate();
  const double deadline = inputs.budget.deadline_s;
  const double rate = optimal_rate(inputs.channel, inputs.rate_mode);
  LatencyEval eval{rate, inputs};

  int i_kv = 1;
  for (uint32_t w = 1; w <= inputs.max_tokens; ++w) {
    for (uint32_t ell = 1; ell <= inputs.profile.num_layers; ++ell) {
      double latency = eval.at(w, sizer.raw_bits(w, ell, i_kv));
      if (latency <= deadline) continue;

      // Fallback (i): compress the intermediate output.
      uint64_t bits = sizer.compressed_bits(w, ell, i_kv);
      latency = eval.at(w, bits);
      if (latency <= deadline) return make_decision(w, ell, i_kv, bits, latency);

      // Fallback (ii): drop the KV cache and recompress.
      i_kv = 0;
      bits = sizer.compressed_bits(w, ell, i_kv);
      latency = eval.at(w, bits);
      if (latency <= deadline) continue;  // keep going deeper without the cache

      // Fallback (iii): shed tokens until the deadline holds.
      uint32_t wt = w;
      while (latency > deadline) {
        if (wt == 1)
          throw BudgetUnsatisfiableError(
              "deadline unmet even at one token, no KV cache, compressed");
        --wt;
        bits = sizer.compressed_bits(wt, ell, i_kv);
        latency = eval.at(wt, bits);
      }
      return make_decision(wt, ell, i_kv, bits, latency);
    }
  }

  // Full depth fits: ship the compressed payload for the final state.
  uint32_t w = inputs.max_tokens;
  uint32_t ell = inputs.profile.num_layers;
  uint64_t bits = sizer.compressed_bits(w, ell, i_kv);
  double latency = eval.at(w, bits);
  if (latency > deadline) {
    // Compression cannot make the final transfer larger in analytic mode, but
    // measured headers can; fall back to token shedding for consistency.
    uint32_t wt = w;
    while (latency > deadline) {
      if (wt == 1)
        throw BudgetUnsatisfiableError("deadline unmet even at one token, compressed");
      --wt;
      bits = sizer.compressed_bits(wt, ell, i_kv);
      latency = eval.at(wt, bits);
    }
    return make_decision(wt, ell, i_kv, bits, latency);
  }
  return make_decision(w, ell, i_kv, bits, latency);
}

OffloadAccounting offload_accounting(const ExitDecision& decision, uint64_t request_tokens) {
  OffloadAccounting acc;
  acc.edge_tokens = decision.tokens_sent;
  acc.server_tokens =
      request_tokens > decision.tokens_sent ? request_tokens - decision.tokens_sent : 0;
  return acc;
}

}  // namespace splitwire
