#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "splitwire/resource_model.hpp"

namespace splitwire {

struct AccuracyKey {
  uint32_t ell = 0;
  uint32_t qw1 = 0;
  uint32_t qw2 = 0;
  uint32_t qa1 = 0;
  uint32_t qa2 = 0;

  auto operator<=>(const AccuracyKey&) const = default;
};

// Measured accuracies per candidate configuration, supplied externally
// (running model evals is out of scope). base/tolerance define the floor
// base - tolerance a candidate must clear.
struct AccuracyTable {
  std::map<AccuracyKey, double> entries;
  double base = 0.0;
  double tolerance = 1.0;

  void add(const AccuracyKey& key, double accuracy);
  // Exact lookup; with nearest = true, falls back to the entry with the
  // smallest L1 distance over the 5-tuple (ties to the smallest key).
  std::optional<double> lookup(const AccuracyKey& key, bool nearest) const;
};

struct PlanConstraints {
  uint64_t memory_cap_bytes = 0;  // M
  uint32_t max_tokens = 1;        // W-bar, the token count the edge must hold

  void validate() const;
};

struct PlannerOptions {
  bool interpolate_nearest = false;
  OpscOverhead overhead{};
};

struct DeploymentPlan {
  QuantScheme scheme;
  uint64_t psi = 0;
  double memory_used_bytes = 0.0;
  double accuracy = 0.0;
};

struct FeasibilityRow {
  QuantScheme scheme;
  uint64_t psi = 0;
  double memory_bytes = 0.0;
  std::optional<double> accuracy;  // empty when the table has no entry
  bool memory_ok = false;
  bool accuracy_ok = false;
  bool feasible = false;
};

class InfeasiblePlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration over (split_layer, weight bits, activation bits)
// maximizing total activation precision under the accuracy floor and the
// edge memory cap (weights + KV cache at max_tokens). Tie-break: larger psi,
// then smaller memory, then smaller split_layer, then lexicographic bits.
DeploymentPlan plan(const ModelProfile& profile, const AccuracyTable& table,
                    const PlanConstraints& constraints, const PlannerOptions& options = {});

// Full enumeration dump for audit; plan() equals its max-psi feasible row.
std::vector<FeasibilityRow> feasibility_report(const ModelProfile& profile,
                                               const AccuracyTable& table,
                                               const PlanConstraints& constraints,
                                               const PlannerOptions& options = {});

}  // namespace splitwire
