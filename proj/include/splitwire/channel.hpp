#pragma once

#include <cstdint>

namespace splitwire {

// Rayleigh-fading link under an epsilon-outage reliability target.
struct ChannelParams {
  double epsilon = 1e-3;      // target outage probability
  double bandwidth_hz = 1e7;  // W
  double snr = 10.0;          // gamma, linear
  double sigma_h2 = 1.0;      // channel gain variance
  double r_min = 1e6;         // feasible rate interval, bits/s
  double r_max = 1e8;

  void validate() const;
};

// P_o(R) = 1 - exp(-(2^(R/W) - 1) / (gamma * sigma_h^2)).
double outage_prob(double rate, const ChannelParams& params);

// ln P_o(R), computed via log1p/expm1 so it stays usable where 1 - P_o
// underflows.
double log_outage_prob(double rate, const ChannelParams& params);

// ceil(ln(eps) / ln(P_o(R))), at least 1. The double form carries counts too
// large for u64 (deep in the high-outage regime).
double retransmission_multiplier(double rate, const ChannelParams& params);
uint64_t retransmission_attempts(double rate, const ChannelParams& params);

// Worst-case transmission latency: (d_tx / R) * attempts. Zero payload costs
// nothing.
double epsilon_latency(double d_tx_bits, double rate, const ChannelParams& params);

enum class RateMode {
  kDirect,  // minimize epsilon_latency for a reference payload
  kPaperG,  // minimize g(R) = ln(1/P_o(R)) / R
};

inline constexpr int kRateGridPoints = 10000;

double rate_grid_point(const ChannelParams& params, int i);

// One-dimensional grid search over [r_min, r_max]; ties break toward the
// smaller rate.
double optimal_rate(const ChannelParams& params, RateMode mode = RateMode::kDirect);

}  // namespace splitwire
