#include "splitwire/json_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace splitwire {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string msg = "invalid config:";
  for (const auto& p : problems) msg += "\n  - " + p;
  return msg;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return j;
}

// Field accessors that accumulate problems instead of throwing immediately.
struct FieldReader {
  const nlohmann::json& j;
  std::string scope;
  std::vector<std::string>& problems;

  template <typename T>
  T get(const std::string& key, T fallback, bool required) {
    if (!j.contains(key)) {
      if (required) problems.push_back(scope + key + ": missing");
      return fallback;
    }
    try {
      return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      problems.push_back(scope + key + ": wrong type");
      return fallback;
    }
  }

  template <typename T>
  T req(const std::string& key, T fallback = T{}) {
    return get<T>(key, fallback, true);
  }

  template <typename T>
  T opt(const std::string& key, T fallback) {
    return get<T>(key, fallback, false);
  }
};

void check(bool ok, const std::string& problem, std::vector<std::string>& problems) {
  if (!ok) problems.push_back(problem);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

ModelProfile profile_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  FieldReader r{j, "profile.", problems};

  ModelProfile p;
  if (j.contains("preset")) {
    std::string preset = r.req<std::string>("preset");
    if (preset == "llama2-7b") {
      p = llama2_7b_profile();
    } else if (preset == "llama2-13b") {
      p = llama2_13b_profile();
    } else {
      problems.push_back("profile.preset: unknown preset '" + preset + "'");
    }
  } else {
    p.num_layers = r.req<uint32_t>("num_layers");
    p.heads = r.req<uint32_t>("heads");
    p.head_dim = r.req<uint32_t>("head_dim");
    p.params_per_layer = r.req<std::vector<uint64_t>>("params_per_layer");
    p.weight_bit_menu = r.opt<std::vector<uint32_t>>("weight_bit_menu", {4, 8, 16});
    p.activation_bit_menu = r.opt<std::vector<uint32_t>>("activation_bit_menu", {2, 3, 4, 8, 16});
  }
  if (j.contains("weight_bit_menu")) p.weight_bit_menu = r.req<std::vector<uint32_t>>("weight_bit_menu");
  if (j.contains("activation_bit_menu"))
    p.activation_bit_menu = r.req<std::vector<uint32_t>>("activation_bit_menu");

  if (!problems.empty()) throw ConfigError(std::move(problems));
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError({e.what()});
  }
  return p;
}

ModelProfile load_profile(const std::string& path_or_preset) {
  if (path_or_preset == "llama2-7b") return llama2_7b_profile();
  if (path_or_preset == "llama2-13b") return llama2_13b_profile();
  return profile_from_json(load_json_file(path_or_preset));
}

ChannelParams channel_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  FieldReader r{j, "channel.", problems};
  ChannelParams c;
  c.epsilon = r.opt<double>("epsilon", c.epsilon);
  c.bandwidth_hz = r.opt<double>("bandwidth_hz", c.bandwidth_hz);
  c.snr = r.opt<double>("snr", c.snr);
  c.sigma_h2 = r.opt<double>("sigma_h2", c.sigma_h2);
  c.r_min = r.req<double>("r_min", 1.0);
  c.r_max = r.req<double>("r_max", 1.0);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError({std::string("channel: ") + e.what()});
  }
  return c;
}

ComputeProfile compute_profile_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  FieldReader r{j, "compute_profile.", problems};
  ComputeProfile c;
  if (j.contains("table")) {
    auto rows = r.req<std::vector<std::vector<double>>>("table");
    for (const auto& row : rows) {
      if (row.size() != 2) {
        problems.push_back("compute_profile.table: entries must be [tokens, seconds]");
        break;
      }
      c.table.emplace_back(static_cast<uint32_t>(row[0]), row[1]);
    }
  } else {
    c.affine_a = r.opt<double>("a", 0.0);
    c.affine_b = r.opt<double>("b", 0.0);
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError({std::string("compute_profile: ") + e.what()});
  }
  return c;
}

AccuracyTable accuracy_table_from_csv(std::istream& in, double base, double tolerance) {
  AccuracyTable table;
  table.base = base;
  table.tolerance = tolerance;

  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "ell,qw1,qw2,qa1,qa2,accuracy")
        throw std::runtime_error("accuracy csv: bad header at line " + std::to_string(line_no) +
                                 " (expected ell,qw1,qw2,qa1,qa2,accuracy)");
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw std::runtime_error("accuracy csv: expected 6 fields at line " + std::to_string(line_no));
    try {
      AccuracyKey key{static_cast<uint32_t>(std::stoul(fields[0])),
                      static_cast<uint32_t>(std::stoul(fields[1])),
                      static_cast<uint32_t>(std::stoul(fields[2])),
                      static_cast<uint32_t>(std::stoul(fields[3])),
                      static_cast<uint32_t>(std::stoul(fields[4]))};
      table.add(key, std::stod(fields[5]));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("accuracy csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) throw std::runtime_error("accuracy csv: empty file");
  return table;
}

AccuracyTable load_accuracy_table(const std::string& path, double base, double tolerance) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return accuracy_table_from_csv(f, base, tolerance);
}

ordered_json plan_to_json(const DeploymentPlan& plan) {
  ordered_json j;
  j["scheme"] = {{"split_layer", plan.scheme.split_layer},
                 {"qw1", plan.scheme.qw1},
                 {"qw2", plan.scheme.qw2},
                 {"qa1", plan.scheme.qa1},
                 {"qa2", plan.scheme.qa2}};
  j["psi"] = plan.psi;
  j["memory_used_bytes"] = plan.memory_used_bytes;
  j["accuracy"] = plan.accuracy;
  return j;
}

QuantScheme scheme_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  FieldReader r{j, "scheme.", problems};
  QuantScheme s;
  s.split_layer = r.req<uint32_t>("split_layer", 1);
  s.qw1 = r.req<uint32_t>("qw1", 4);
  s.qw2 = r.req<uint32_t>("qw2", 4);
  s.qa1 = r.req<uint32_t>("qa1", 4);
  s.qa2 = r.req<uint32_t>("qa2", 4);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return s;
}

DeploymentPlan plan_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  FieldReader r{j, "plan.", problems};
  DeploymentPlan p;
  if (!j.contains("scheme")) {
    problems.push_back("plan.scheme: missing");
    throw ConfigError(std::move(problems));
  }
  p.scheme = scheme_from_json(j.at("scheme"));
  p.psi = r.opt<uint64_t>("psi", 0);
  p.memory_used_bytes = r.opt<double>("memory_used_bytes", 0.0);
  p.accuracy = r.opt<double>("accuracy", 0.0);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return p;
}

ordered_json decision_to_json(const ExitDecision& d, const OffloadAccounting& acc) {
  ordered_json j;
  j["tokens_sent"] = d.tokens_sent;
  j["exit_layer"] = d.exit_layer;
  j["i_kv"] = d.i_kv;
  j["payload_bits"] = d.payload_bits;
  j["total_latency_s"] = d.total_latency_s;
  j["depth"] = d.depth;
  j["edge_tokens"] = acc.edge_tokens;
  j["server_tokens"] = acc.server_tokens;
  return j;
}

SimulationScenario scenario_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  FieldReader r{j, "scenario.", problems};
  SimulationScenario s;

  if (j.contains("profile")) {
    try {
      if (j.at("profile").is_string()) {
        s.inputs.profile = load_profile(j.at("profile").get<std::string>());
      } else {
        s.inputs.profile = profile_from_json(j.at("profile"));
      }
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) problems.push_back(p);
    }
  } else {
    problems.push_back("scenario.profile: missing");
  }

  if (j.contains("plan")) {
    try {
      s.inputs.scheme = plan_from_json(j.at("plan")).scheme;
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) problems.push_back(p);
    }
  } else {
    problems.push_back("scenario.plan: missing");
  }

  s.inputs.max_tokens = r.req<uint32_t>("max_tokens", 1);
  uint32_t devices = r.opt<uint32_t>("devices", 1);
  check(devices >= 1, "scenario.devices: must be >= 1", problems);

  if (j.contains("deadline_s") && j.at("deadline_s").is_array()) {
    s.deadlines_s = r.req<std::vector<double>>("deadline_s");
    check(s.deadlines_s.size() == devices || !j.contains("devices"),
          "scenario.deadline_s: array length must match devices", problems);
    devices = static_cast<uint32_t>(s.deadlines_s.size());
  } else {
    double d = r.req<double>("deadline_s", 1.0);
    s.deadlines_s.assign(devices, d);
  }
  for (double d : s.deadlines_s)
    check(d > 0.0, "scenario.deadline_s: deadlines must be > 0", problems);

  if (j.contains("compute_profile")) {
    try {
      s.inputs.compute = compute_profile_from_json(j.at("compute_profile"));
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) problems.push_back(p);
    }
  } else {
    problems.push_back("scenario.compute_profile: missing");
  }

  if (j.contains("channel")) {
    try {
      s.inputs.channel = channel_from_json(j.at("channel"));
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) problems.push_back(p);
    }
  } else {
    problems.push_back("scenario.channel: missing");
  }

  std::string size_source = r.opt<std::string>("size_source", "analytic");
  if (size_source == "analytic") {
    s.inputs.size_source = SizeSource::kAnalytic;
  } else if (size_source == "measured") {
    s.inputs.size_source = SizeSource::kMeasured;
  } else {
    problems.push_back("scenario.size_source: must be \"analytic\" or \"measured\"");
  }

  std::string rate_mode = r.opt<std::string>("rate_mode", "direct");
  if (rate_mode == "direct") {
    s.inputs.rate_mode = RateMode::kDirect;
  } else if (rate_mode == "paper-g") {
    s.inputs.rate_mode = RateMode::kPaperG;
  } else {
    problems.push_back("scenario.rate_mode: must be \"direct\" or \"paper-g\"");
  }

  s.inputs.compression_ratio = r.opt<double>("compression_ratio", kDefaultCompressionRatio);
  s.inputs.tau = r.opt<float>("tau", 5.0f);
  if (j.contains("tabq")) {
    FieldReader tq{j.at("tabq"), "scenario.tabq.", problems};
    s.inputs.tabq.q_max_bits = tq.opt<uint32_t>("qmax", s.inputs.tabq.q_max_bits);
    s.inputs.tabq.q_min_bits = tq.opt<uint32_t>("qmin", s.inputs.tabq.q_min_bits);
    s.inputs.tabq.delta = tq.opt<double>("delta", s.inputs.tabq.delta);
  }
  s.inputs.seed = r.opt<uint64_t>("seed", 0);
  s.request_tokens = r.opt<uint64_t>("request_tokens", s.inputs.max_tokens);

  if (!problems.empty()) throw ConfigError(std::move(problems));

  s.inputs.budget.deadline_s = s.deadlines_s.front();
  try {
    s.inputs.validate();
  } catch (const std::exception& e) {
    throw ConfigError({e.what()});
  }
  return s;
}

SimulationScenario load_scenario(const std::string& path) {
  return scenario_from_json(load_json_file(path));
}

uint64_t parse_byte_size(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
    ++i;
  if (i == 0) throw std::invalid_argument("byte size: expected a number, got '" + text + "'");
  double value = std::stod(text.substr(0, i));
  std::string unit = text.substr(i);
  uint64_t mult = 1;
  if (unit.empty() || unit == "B") {
    mult = 1;
  } else if (unit == "KiB") {
    mult = 1ull << 10;
  } else if (unit == "MiB") {
    mult = 1ull << 20;
  } else if (unit == "GiB") {
    mult = 1ull << 30;
  } else if (unit == "KB") {
    mult = 1000;
  } else if (unit == "MB") {
    mult = 1000000;
  } else if (unit == "GB") {
    mult = 1000000000;
  } else {
    throw std::invalid_argument("byte size: unknown unit '" + unit + "'");
  }
  return static_cast<uint64_t>(value * double(mult));
}

}  // namespace splitwire
