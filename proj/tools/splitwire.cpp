#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "splitwire/early_exit.hpp"
#include "splitwire/json_io.hpp"
#include "splitwire/payload.hpp"
#include "splitwire/planner.hpp"
#include "splitwire/tensor.hpp"

namespace sw = splitwire;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

unsigned thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("SPLITWIRE_THREADS")) {
    char* end = nullptr;
    unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned long>(n, cap);
  }
  return n;
}

void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
  unsigned workers = std::min<size_t>(thread_count(), count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error("input file does not exist: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<uint32_t> parse_u32_list(const std::string& text) {
  std::vector<uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<uint32_t>(std::stoul(item)));
  if (out.empty()) throw std::invalid_argument("empty list: " + text);
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty list: " + text);
  return out;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  uint32_t rows = 16;
  uint32_t cols = 4096;
  double threshold = 100.0;
  double fraction = 5e-6;
  double bulk_scale = 0.5;
  uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  sw::OutlierStats stats{static_cast<float>(a.threshold), a.fraction,
                         static_cast<float>(a.bulk_scale)};
  sw::ActivationTensor t = sw::synth_activations(a.rows, a.cols, stats, a.seed);
  sw::save_tensor(a.out, t);
  size_t above = 0;
  for (float v : t.values()) above += std::abs(v) >= stats.outlier_threshold;
  std::cout << "wrote " << a.out << ": " << t.rows() << "x" << t.cols() << " ("
            << sw::tensor_to_bytes(t).size() << " bytes, " << above
            << " elements at or above the threshold)\n";
  return 0;
}

// --- compress / decompress ---------------------------------------------------

struct CompressArgs {
  std::string in;
  std::string out;
  double tau = 5.0;
  uint32_t qmax = 4;
  uint32_t qmin = 2;
  double delta = 0.2;
  bool literal_alg1 = false;
  uint32_t heads = 1;
  uint32_t layer = 0;
  bool kv = false;
};

int cmd_compress(const CompressArgs& a) {
  require_file(a.in);
  sw::ActivationTensor t = sw::load_tensor(a.in);

  if (a.heads == 0 || t.cols() % a.heads != 0)
    throw std::runtime_error("--heads must divide the tensor width");
  uint32_t head_dim = t.cols() / a.heads;
  if (a.heads > 0xFFFF || head_dim > 0xFFFF || a.layer > 0xFFFF)
    throw std::runtime_error("heads, head_dim and layer must fit in 16 bits");

  sw::TabqConfig cfg{a.qmax, a.qmin, a.delta, a.literal_alg1};
  sw::PayloadMeta meta;
  meta.kv_slice = a.kv;
  meta.layer = static_cast<uint16_t>(a.layer);
  meta.heads = static_cast<uint16_t>(a.heads);
  meta.head_dim = static_cast<uint16_t>(head_dim);

  sw::CompressedPayload p = sw::compress(t, static_cast<float>(a.tau), cfg, meta);
  sw::save_payload(a.out, p);

  // Roundtrip stats: outliers must be exact, bulk error bounded by row scale.
  sw::ActivationTensor r = sw::decompress(p);
  double max_bulk_err = 0.0;
  double max_scale = 0.0;
  size_t outliers = 0;
  bool outliers_exact = true;
  for (uint32_t row = 0; row < t.rows(); ++row) {
    max_scale = std::max(max_scale, double(p.row_records[row].scale));
    for (uint32_t c = 0; c < t.cols(); ++c) {
      float orig = t.at(row, c);
      float got = r.at(row, c);
      if (std::abs(orig) >= a.tau) {
        ++outliers;
        outliers_exact = outliers_exact && orig == got;
      } else {
        max_bulk_err = std::max(max_bulk_err, std::abs(double(orig) - double(got)));
      }
    }
  }

  std::cout << "wrote " << a.out << ": " << p.size_bytes() << " bytes (baseline "
            << sw::baseline_size_bytes(t.rows(), t.cols()) << ", outlier part "
            << p.above_bytes() << ", bulk part " << p.below_bytes() << ")\n";
  std::cout << "outliers " << outliers << (outliers_exact ? " (exact)" : " (MISMATCH)")
            << ", max bulk error " << fmt_double(max_bulk_err) << ", max row scale "
            << fmt_double(max_scale) << "\n";
  return outliers_exact ? 0 : 1;
}

int cmd_decompress(const std::string& in, const std::string& out) {
  require_file(in);
  sw::CompressedPayload p = sw::load_payload(in);
  sw::ActivationTensor t = sw::decompress(p);
  sw::save_tensor(out, t);
  std::cout << "wrote " << out << ": " << t.rows() << "x" << t.cols() << " from "
            << p.size_bytes() << " payload bytes (layer " << p.meta.layer << ", "
            << (p.meta.kv_slice ? "kv slice" : "hidden state") << ")\n";
  return 0;
}

// --- plan --------------------------------------------------------------------

struct PlanArgs {
  std::string profile;
  std::string acc;
  std::string mem_cap;
  uint32_t max_tokens = 350;
  double acc_base = 0.0;
  bool acc_base_set = false;
  double acc_delta = 1.0;
  std::string interpolate;
  uint64_t overhead_per_group = 0;
  uint64_t group_size = 128;
  std::string out;
  std::string feasibility_csv;
};

std::string feasibility_csv_text(const std::vector<sw::FeasibilityRow>& rows) {
  std::string csv = "ell,qw1,qw2,qa1,qa2,psi,memory_bytes,accuracy,memory_ok,accuracy_ok,feasible\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.scheme.split_layer) + "," + std::to_string(r.scheme.qw1) + "," +
           std::to_string(r.scheme.qw2) + "," + std::to_string(r.scheme.qa1) + "," +
           std::to_string(r.scheme.qa2) + "," + std::to_string(r.psi) + "," +
           fmt_double(r.memory_bytes) + "," + (r.accuracy ? fmt_double(*r.accuracy) : "") + "," +
           std::to_string(int(r.memory_ok)) + "," + std::to_string(int(r.accuracy_ok)) + "," +
           std::to_string(int(r.feasible)) + "\n";
  }
  return csv;
}

int cmd_plan(const PlanArgs& a) {
  sw::ModelProfile profile = sw::load_profile(a.profile);
  require_file(a.acc);
  sw::AccuracyTable table = sw::load_accuracy_table(a.acc, a.acc_base, a.acc_delta);
  if (!a.acc_base_set) {
    // Default floor reference: the best accuracy in the table.
    double best = 0.0;
    for (const auto& [k, v] : table.entries) best = std::max(best, v);
    table.base = best;
  }

  sw::PlanConstraints constraints{sw::parse_byte_size(a.mem_cap), a.max_tokens};
  sw::PlannerOptions options;
  if (!a.interpolate.empty()) {
    if (a.interpolate != "nearest")
      throw std::runtime_error("--interpolate supports only 'nearest'");
    options.interpolate_nearest = true;
  }
  options.overhead = sw::OpscOverhead{a.overhead_per_group, a.group_size};

  // The audit dump covers infeasible instances too, so write it first.
  if (!a.feasibility_csv.empty())
    write_text(a.feasibility_csv,
               feasibility_csv_text(sw::feasibility_report(profile, table, constraints, options)));

  sw::DeploymentPlan plan = sw::plan(profile, table, constraints, options);
  std::string text = sw::plan_to_json(plan).dump(2) + "\n";
  std::cout << text;
  if (!a.out.empty()) write_text(a.out, text);
  return 0;
}

// --- simulate / report ---------------------------------------------------------

std::string decisions_csv(const std::vector<sw::ordered_json>& records) {
  std::string csv = "device,tokens_sent,exit_layer,i_kv,payload_bits,total_latency_s,depth,edge_tokens,server_tokens\n";
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv += std::to_string(i) + "," + r["tokens_sent"].dump() + "," + r["exit_layer"].dump() + "," +
           r["i_kv"].dump() + "," + r["payload_bits"].dump() + "," +
           fmt_double(r["total_latency_s"].get<double>()) + "," + r["depth"].dump() + "," +
           r["edge_tokens"].dump() + "," + r["server_tokens"].dump() + "\n";
  }
  return csv;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out,
                 const std::string& csv_out) {
  require_file(scenario_path);
  sw::SimulationScenario scenario = sw::load_scenario(scenario_path);

  std::vector<sw::ordered_json> records(scenario.deadlines_s.size());
  sw::PayloadSizer sizer(scenario.inputs);  // devices share the slice cache
  for (size_t i = 0; i < scenario.deadlines_s.size(); ++i) {
    sw::EarlyExitInputs inputs = scenario.inputs;
    inputs.budget.deadline_s = scenario.deadlines_s[i];
    sw::ExitDecision d = sw::early_exit(inputs, sizer);
    sw::OffloadAccounting acc = sw::offload_accounting(d, scenario.request_tokens);
    records[i] = sw::decision_to_json(d, acc);
    records[i]["device"] = i;
  }

  sw::ordered_json arr = sw::ordered_json::array();
  for (auto& r : records) arr.push_back(r);
  std::string text = arr.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) write_text(out, text);
  if (!csv_out.empty()) write_text(csv_out, decisions_csv(records));
  return 0;
}

int cmd_report(const std::string& scenario_path, const std::string& wbar_list,
               const std::string& out) {
  require_file(scenario_path);
  std::vector<uint32_t> wbars = parse_u32_list(wbar_list);

  std::ifstream f(scenario_path);
  nlohmann::json raw;
  f >> raw;
  bool explicit_request = raw.contains("request_tokens");

  std::string csv = "w_bar,devices,edge_tokens,server_tokens\n";
  for (uint32_t wbar : wbars) {
    nlohmann::json j = raw;
    j["max_tokens"] = wbar;
    if (!explicit_request)
      j["request_tokens"] = *std::max_element(wbars.begin(), wbars.end());
    sw::SimulationScenario scenario = sw::scenario_from_json(j);

    uint64_t edge = 0, server = 0;
    sw::PayloadSizer sizer(scenario.inputs);
    for (double deadline : scenario.deadlines_s) {
      sw::EarlyExitInputs inputs = scenario.inputs;
      inputs.budget.deadline_s = deadline;
      sw::ExitDecision d = sw::early_exit(inputs, sizer);
      sw::OffloadAccounting acc = sw::offload_accounting(d, scenario.request_tokens);
      edge += acc.edge_tokens;
      server += acc.server_tokens;
    }
    csv += std::to_string(wbar) + "," + std::to_string(scenario.deadlines_s.size()) + "," +
           std::to_string(edge) + "," + std::to_string(server) + "\n";
  }
  std::cout << csv;
  if (!out.empty()) write_text(out, csv);
  return 0;
}

// --- sweep ---------------------------------------------------------------------

struct SweepArgs {
  uint32_t cols = 4096;
  std::string w_list = "1,2,4,8,16,32,64,128,256";
  std::string tau_list = "1,5,10";
  std::string qmax_list = "2,4,8";
  uint32_t qmin = 2;
  double delta = 0.2;
  double threshold = 100.0;
  double fraction = 5e-6;
  double bulk_scale = 0.5;
  uint64_t seed = 0;
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.cols == 0 || a.cols > 0xFFFF)
    throw std::runtime_error("--cols must be in [1, 65535] (one head per payload)");
  std::vector<uint32_t> ws = parse_u32_list(a.w_list);
  std::vector<double> taus = parse_double_list(a.tau_list);
  std::vector<uint32_t> qmaxs = parse_u32_list(a.qmax_list);
  std::sort(ws.begin(), ws.end());
  std::sort(taus.begin(), taus.end());
  std::sort(qmaxs.begin(), qmaxs.end());

  uint32_t w_max = ws.back();
  sw::OutlierStats stats{static_cast<float>(a.threshold), a.fraction,
                         static_cast<float>(a.bulk_scale)};
  // One master tensor; every w measures its prefix so the token axis grows a
  // fixed sequence, as in a decode trace.
  sw::ActivationTensor master = sw::synth_activations(w_max, a.cols, stats, a.seed);

  struct Point {
    double tau;
    uint32_t qmax, w;
    size_t payload = 0, baseline = 0, above = 0, below = 0;
  };
  std::vector<Point> points;
  for (double tau : taus)
    for (uint32_t qmax : qmaxs)
      for (uint32_t w : ws) points.push_back({tau, qmax, w});

  parallel_for(points.size(), [&](size_t i) {
    Point& pt = points[i];
    std::vector<float> slice(master.values().begin(),
                             master.values().begin() + size_t(pt.w) * a.cols);
    sw::ActivationTensor t(pt.w, a.cols, std::move(slice));
    sw::TabqConfig cfg{pt.qmax, std::min(a.qmin, pt.qmax), a.delta, false};
    sw::PayloadMeta meta;
    meta.heads = 1;
    meta.head_dim = static_cast<uint16_t>(a.cols);
    sw::CompressedPayload p = sw::compress(t, static_cast<float>(pt.tau), cfg, meta);
    pt.payload = p.size_bytes();
    pt.baseline = sw::baseline_size_bytes(pt.w, a.cols);
    pt.above = p.above_bytes();
    pt.below = p.below_bytes();
  });

  std::string csv = "tau,qmax,w,payload_bytes,baseline_bytes,above_bytes,below_bytes,above_share\n";
  for (const Point& pt : points) {
    csv += fmt_double(pt.tau) + "," + std::to_string(pt.qmax) + "," + std::to_string(pt.w) + "," +
           std::to_string(pt.payload) + "," + std::to_string(pt.baseline) + "," +
           std::to_string(pt.above) + "," + std::to_string(pt.below) + "," +
           fmt_double(double(pt.above) / double(pt.payload)) + "\n";
  }
  std::cout << csv;
  if (!a.out.empty()) write_text(a.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splitwire: split-computing activation compression and planning toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic activation tensor");
  synth->add_option("--rows", synth_args.rows, "Token rows")->required();
  synth->add_option("--cols", synth_args.cols, "Hidden width");
  synth->add_option("--threshold", synth_args.threshold, "Outlier magnitude cutoff");
  synth->add_option("--fraction", synth_args.fraction, "Outlier fraction");
  synth->add_option("--bulk-scale", synth_args.bulk_scale, "Bulk Laplace scale");
  synth->add_option("--seed", synth_args.seed, "RNG seed");
  synth->add_option("--out", synth_args.out, "Output .swt path")->required();

  CompressArgs comp_args;
  auto* comp = app.add_subcommand("compress", "Compress a tensor into an SWP1 payload");
  comp->add_option("--in", comp_args.in, "Input .swt tensor")->required();
  comp->add_option("--out", comp_args.out, "Output .swp payload")->required();
  comp->add_option("--tau", comp_args.tau, "Threshold-split cutoff");
  comp->add_option("--qmax", comp_args.qmax, "Max bits per element incl. sign");
  comp->add_option("--qmin", comp_args.qmin, "Min bits per element incl. sign");
  comp->add_option("--delta", comp_args.delta, "Distortion tolerance");
  comp->add_flag("--literal-alg1", comp_args.literal_alg1,
                 "Return the first tolerance-violating bit-width");
  comp->add_option("--heads", comp_args.heads, "Attention heads (head_dim = cols/heads)");
  comp->add_option("--layer", comp_args.layer, "Split layer recorded in the header");
  comp->add_flag("--kv", comp_args.kv, "Mark the payload as a KV-cache slice");

  std::string dec_in, dec_out;
  auto* dec = app.add_subcommand("decompress", "Restore a tensor from an SWP1 payload");
  dec->add_option("--in", dec_in, "Input .swp payload")->required();
  dec->add_option("--out", dec_out, "Output .swt tensor")->required();

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Select split layer and bit-widths under constraints");
  plan->add_option("--profile", plan_args.profile, "Model profile JSON or preset name")->required();
  plan->add_option("--acc", plan_args.acc, "Accuracy table CSV")->required();
  plan->add_option("--mem-cap", plan_args.mem_cap, "Edge memory cap (e.g. 8GiB)")->required();
  plan->add_option("--max-tokens", plan_args.max_tokens, "Max token count the edge must hold");
  plan->add_option("--acc-base", plan_args.acc_base, "Baseline accuracy for the floor");
  plan->add_option("--acc-delta", plan_args.acc_delta, "Acceptable accuracy drop");
  plan->add_option("--interpolate", plan_args.interpolate,
                   "Missing-entry policy: nearest (default: infeasible)");
  plan->add_option("--overhead-per-group", plan_args.overhead_per_group,
                   "Quantization metadata bytes per parameter group");
  plan->add_option("--group-size", plan_args.group_size, "Parameters per metadata group");
  plan->add_option("--out", plan_args.out, "Also write the plan JSON here");
  plan->add_option("--feasibility-csv", plan_args.feasibility_csv,
                   "Dump the full candidate enumeration as CSV");

  std::string sim_scenario, sim_out, sim_csv;
  auto* sim = app.add_subcommand("simulate", "Run the early-exit simulator");
  sim->add_option("--scenario", sim_scenario, "Scenario JSON")->required();
  sim->add_option("--out", sim_out, "Also write the decisions JSON here");
  sim->add_option("--csv", sim_csv, "Also write a per-device CSV here");

  std::string rep_scenario, rep_wbars = "50,150,250,350", rep_out;
  auto* rep = app.add_subcommand("report", "Offload accounting across max-token settings");
  rep->add_option("--scenario", rep_scenario, "Scenario JSON")->required();
  rep->add_option("--max-tokens-list", rep_wbars, "Comma-separated W-bar values");
  rep->add_option("--out", rep_out, "Also write the CSV here");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Payload-size sweep over (w, tau, qmax)");
  sweep->add_option("--cols", sweep_args.cols, "Hidden width");
  sweep->add_option("--w-list", sweep_args.w_list, "Comma-separated token counts");
  sweep->add_option("--tau-list", sweep_args.tau_list, "Comma-separated thresholds");
  sweep->add_option("--qmax-list", sweep_args.qmax_list, "Comma-separated max bit-widths");
  sweep->add_option("--qmin", sweep_args.qmin, "Min bits per element");
  sweep->add_option("--delta", sweep_args.delta, "Distortion tolerance");
  sweep->add_option("--threshold", sweep_args.threshold, "Synthetic outlier cutoff");
  sweep->add_option("--fraction", sweep_args.fraction, "Synthetic outlier fraction");
  sweep->add_option("--bulk-scale", sweep_args.bulk_scale, "Synthetic bulk scale");
  sweep->add_option("--seed", sweep_args.seed, "RNG seed");
  sweep->add_option("--out", sweep_args.out, "Output CSV path");

  CLI11_PARSE(app, argc, argv);
  plan_args.acc_base_set = plan->count("--acc-base") > 0;

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (comp->parsed()) return cmd_compress(comp_args);
    if (dec->parsed()) return cmd_decompress(dec_in, dec_out);
    if (plan->parsed()) return cmd_plan(plan_args);
    if (sim->parsed()) return cmd_simulate(sim_scenario, sim_out, sim_csv);
    if (rep->parsed()) return cmd_report(rep_scenario, rep_wbars, rep_out);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
  } catch (const sw::InfeasiblePlanError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const sw::BudgetUnsatisfiableError& e) {
    std::cerr << "budget unsatisfiable: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return 0;
}
