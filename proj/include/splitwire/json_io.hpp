#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitwire/channel.hpp"
#include "splitwire/early_exit.hpp"
#include "splitwire/model_profile.hpp"
#include "splitwire/planner.hpp"

namespace splitwire {

using ordered_json = nlohmann::ordered_json;

// Collects every field-level problem found while validating a config.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// {"num_layers","heads","head_dim","params_per_layer",...} or {"preset":
// "llama2-7b"|"llama2-13b"}; bit menus optional with preset defaults.
ModelProfile profile_from_json(const nlohmann::json& j);
ModelProfile load_profile(const std::string& path_or_preset);

ChannelParams channel_from_json(const nlohmann::json& j);
ComputeProfile compute_profile_from_json(const nlohmann::json& j);

// CSV with header ell,qw1,qw2,qa1,qa2,accuracy. base/tolerance come from the
// caller (flags or scenario config).
AccuracyTable accuracy_table_from_csv(std::istream& in, double base, double tolerance);
AccuracyTable load_accuracy_table(const std::string& path, double base, double tolerance);

ordered_json plan_to_json(const DeploymentPlan& plan);
DeploymentPlan plan_from_json(const nlohmann::json& j);
QuantScheme scheme_from_json(const nlohmann::json& j);

ordered_json decision_to_json(const ExitDecision& d, const OffloadAccounting& acc);

// Full simulate/report scenario.
struct SimulationScenario {
  EarlyExitInputs inputs;            // deadline filled per device
  std::vector<double> deadlines_s;   // one entry per device
  uint64_t request_tokens = 0;       // defaults to max_tokens
};

SimulationScenario scenario_from_json(const nlohmann::json& j);
SimulationScenario load_scenario(const std::string& path);

// "8GiB", "512MiB", "1000000" -> bytes.
uint64_t parse_byte_size(const std::string& text);

}  // namespace splitwire
