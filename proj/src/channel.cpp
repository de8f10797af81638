#include "splitwire/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace splitwire {

void ChannelParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("channel: epsilon must be in (0,1)");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("channel: bandwidth must be > 0");
  if (!(snr > 0.0)) throw std::invalid_argument("channel: snr must be > 0");
  if (!(sigma_h2 > 0.0)) throw std::invalid_argument("channel: sigma_h2 must be > 0");
  // r_min == r_max is the degenerate single-candidate interval.
  if (!(r_min > 0.0 && r_min <= r_max)) throw std::invalid_argument("channel: need 0 < r_min <= r_max");
}

namespace {

double snr_exponent(double rate, const ChannelParams& params) {
  // (2^(R/W) - 1) / (gamma * sigma_h^2), via expm1 for small R/W.
  return std::expm1(std::log(2.0) * rate / params.bandwidth_hz) / (params.snr * params.sigma_h2);
}

}  // namespace

double outage_prob(double rate, const ChannelParams& params) {
  if (!(rate > 0.0)) throw std::invalid_argument("outage_prob: rate must be > 0");
  return -std::expm1(-snr_exponent(rate, params));
}

double log_outage_prob(double rate, const ChannelParams& params) {
  if (!(rate > 0.0)) throw std::invalid_argument("log_outage_prob: rate must be > 0");
  double e = std::exp(-snr_exponent(rate, params));
  return std::log1p(-e);
}

double retransmission_multiplier(double rate, const ChannelParams& params) {
  params.validate();
  double log_po = log_outage_prob(rate, params);
  if (!(log_po < 0.0) || !std::isfinite(log_po))
    throw std::domain_error("epsilon_latency: outage probability is degenerate at this rate");
  double ratio = std::log(params.epsilon) / log_po;
  // Snap ratios that are integers up to rounding noise before taking the
  // ceiling (e.g. ln(1e-3)/ln(1e-1) must give exactly 3 attempts).
  double snapped = std::ceil(ratio - 1e-9 * std::max(1.0, std::abs(ratio)));
  return std::max(snapped, 1.0);
}

uint64_t retransmission_attempts(double rate, const ChannelParams& params) {
  double m = retransmission_multiplier(rate, params);
  if (m >= double(std::numeric_limits<uint64_t>::max()))
    throw std::domain_error("epsilon_latency: retransmission count overflow");
  return static_cast<uint64_t>(m);
}

double epsilon_latency(double d_tx_bits, double rate, const ChannelParams& params) {
  if (!(d_tx_bits >= 0.0)) throw std::invalid_argument("epsilon_latency: negative payload");
  if (d_tx_bits == 0.0) return 0.0;
  if (!(rate >= params.r_min && rate <= params.r_max))
    throw std::invalid_argument("epsilon_latency: rate outside [r_min, r_max]");
  return d_tx_bits / rate * retransmission_multiplier(rate, params);
}

double rate_grid_point(const ChannelParams& params, int i) {
  if (params.r_min == params.r_max || i == 0) return params.r_min;
  if (i == kRateGridPoints - 1) return params.r_max;
  double r = params.r_min + (params.r_max - params.r_min) * double(i) / double(kRateGridPoints - 1);
  return std::min(r, params.r_max);
}

double optimal_rate(const ChannelParams& params, RateMode mode) {
  params.validate();
  if (params.r_min == params.r_max) return params.r_min;

  double best_rate = 0.0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kRateGridPoints; ++i) {
    double r = rate_grid_point(params, i);
    double obj;
    try {
      if (mode == RateMode::kPaperG) {
        obj = -log_outage_prob(r, params) / r;  // g(R) = ln(1/P_o)/R
      } else {
        obj = epsilon_latency(1.0, r, params);
      }
    } catch (const std::domain_error&) {
      continue;  // degenerate outage at this grid point
    }
    if (obj < best_obj) {
      best_obj = obj;
      best_rate = r;
    }
  }
  if (best_rate == 0.0) throw std::domain_error("optimal_rate: no usable rate in the interval");
  return best_rate;
}

}  // namespace splitwire
