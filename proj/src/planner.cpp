#include "splitwire/planner.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <tuple>

namespace splitwire {

void AccuracyTable::add(const AccuracyKey& key, double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 100.0))
    throw std::invalid_argument("accuracy table: accuracy must be in [0,100]");
  if (!entries.emplace(key, accuracy).second)
    throw std::invalid_argument("accuracy table: duplicate key");
}

std::optional<double> AccuracyTable::lookup(const AccuracyKey& key, bool nearest) const {
  auto it = entries.find(key);
  if (it != entries.end()) return it->second;
  if (!nearest || entries.empty()) return std::nullopt;

  auto dist = [&](const AccuracyKey& k) {
    auto d = [](uint32_t a, uint32_t b) { return uint64_t(a > b ? a - b : b - a); };
    return d(k.ell, key.ell) + d(k.qw1, key.qw1) + d(k.qw2, key.qw2) + d(k.qa1, key.qa1) +
           d(k.qa2, key.qa2);
  };
  auto best = entries.begin();
  uint64_t best_d = dist(best->first);
  for (auto it2 = std::next(entries.begin()); it2 != entries.end(); ++it2) {
    uint64_t d = dist(it2->first);
    if (d < best_d) {  // map order makes the first (smallest) key win ties
      best_d = d;
      best = it2;
    }
  }
  return best->second;
}

void PlanConstraints::validate() const {
  if (memory_cap_bytes == 0) throw std::invalid_argument("constraints: memory cap must be > 0");
  if (max_tokens < 1) throw std::invalid_argument("constraints: max_tokens must be >= 1");
}

namespace {

struct Candidate {
  QuantScheme scheme;
  uint64_t psi = 0;
  uint64_t memory_eighth_bytes = 0;  // bits; exact
  std::optional<double> accuracy;
  bool memory_ok = false;
  bool accuracy_ok = false;

  bool feasible() const { return memory_ok && accuracy_ok; }

  // Total order for argmax: larger psi, smaller memory, smaller split layer,
  // lexicographically smaller bits.
  bool better_than(const Candidate& o) const {
    if (psi != o.psi) return psi > o.psi;
    if (memory_eighth_bytes != o.memory_eighth_bytes)
      return memory_eighth_bytes < o.memory_eighth_bytes;
    if (scheme.split_layer != o.scheme.split_layer)
      return scheme.split_layer < o.scheme.split_layer;
    auto key = [](const QuantScheme& s) {
      return std::tuple(s.qw1, s.qw2, s.qa1, s.qa2);
    };
    return key(scheme) < key(o.scheme);
  }
};

template <typename Fn>
void for_each_candidate(const ModelProfile& profile, const AccuracyTable& table,
                        const PlanConstraints& constraints, const PlannerOptions& options,
                        Fn&& fn) {
  profile.validate();
  constraints.validate();
  const uint64_t cap_bits = constraints.memory_cap_bytes * 8;

  for (uint32_t ell = 1; ell <= profile.num_layers; ++ell) {
    for (uint32_t qw1 : profile.weight_bit_menu) {
      for (uint32_t qw2 : profile.weight_bit_menu) {
        for (uint32_t qa1 : profile.activation_bit_menu) {
          for (uint32_t qa2 : profile.activation_bit_menu) {
            Candidate c;
            c.scheme = QuantScheme{ell, qw1, qw2, qa1, qa2};
            c.psi = psi(profile, c.scheme);
            uint64_t weight_bits = opsc_memory_bits(profile, c.scheme, options.overhead);
            uint64_t kv_bits = kv_cache_bits(constraints.max_tokens, ell, profile, c.scheme);
            uint64_t kv_bytes = (kv_bits + 7) / 8;  // rounded up to whole bytes
            c.memory_eighth_bytes = weight_bits + kv_bytes * 8;
            c.memory_ok = c.memory_eighth_bytes <= cap_bits;
            c.accuracy = table.lookup(
                AccuracyKey{ell, qw1, qw2, qa1, qa2}, options.interpolate_nearest);
            c.accuracy_ok = c.accuracy && *c.accuracy >= table.base - table.tolerance;
            fn(c);
          }
        }
      }
    }
  }
}

}  // namespace

DeploymentPlan plan(const ModelProfile& profile, const AccuracyTable& table,
                    const PlanConstraints& constraints, const PlannerOptions& options) {
  std::optional<Candidate> best;
  size_t total = 0, fail_memory = 0, fail_accuracy = 0;
  uint64_t min_overage_bits = UINT64_MAX;   // among accuracy-feasible candidates
  double min_acc_shortfall = HUGE_VAL;      // among memory-feasible candidates

  for_each_candidate(profile, table, constraints, options, [&](const Candidate& c) {
    ++total;
    if (c.feasible()) {
      if (!best || c.better_than(*best)) best = c;
      return;
    }
    if (!c.memory_ok) ++fail_memory;
    if (!c.accuracy_ok) ++fail_accuracy;
    uint64_t cap_bits = constraints.memory_cap_bytes * 8;
    if (c.accuracy_ok && c.memory_eighth_bytes > cap_bits)
      min_overage_bits = std::min(min_overage_bits, c.memory_eighth_bytes - cap_bits);
    if (c.memory_ok && c.accuracy)
      min_acc_shortfall =
          std::min(min_acc_shortfall, (table.base - table.tolerance) - *c.accuracy);
  });

  if (!best) {
    std::string msg = "no feasible deployment among " + std::to_string(total) + " candidates (" +
                      std::to_string(fail_memory) + " over memory, " +
                      std::to_string(fail_accuracy) + " under the accuracy floor)";
    if (min_overage_bits != UINT64_MAX)
      msg += "; best accuracy-feasible near-miss exceeds the cap by " +
             std::to_string((min_overage_bits + 7) / 8) + " bytes";
    else if (min_acc_shortfall != HUGE_VAL)
      msg += "; best memory-feasible near-miss falls " + std::to_string(min_acc_shortfall) +
             " points short of the accuracy floor";
    throw InfeasiblePlanError(msg);
  }

  DeploymentPlan result;
  result.scheme = best->scheme;
  result.psi = best->psi;
  result.memory_used_bytes = double(best->memory_eighth_bytes) / 8.0;
  result.accuracy = *best->accuracy;
  return result;
}

std::vector<FeasibilityRow> feasibility_report(const ModelProfile& profile,
                                               const AccuracyTable& table,
                                               const PlanConstraints& constraints,
                                               const PlannerOptions& options) {
  std::vector<FeasibilityRow> rows;
  for_each_candidate(profile, table, constraints, options, [&](const Candidate& c) {
    FeasibilityRow row;
    row.scheme = c.scheme;
    row.psi = c.psi;
    row.memory_bytes = double(c.memory_eighth_bytes) / 8.0;
    row.accuracy = c.accuracy;
    row.memory_ok = c.memory_ok;
    row.accuracy_ok = c.accuracy_ok;
    row.feasible = c.feasible();
    rows.push_back(row);
  });
  return rows;
}

}  // namespace splitwire
