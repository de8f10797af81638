#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "splitwire/channel.hpp"
#include "splitwire/early_exit.hpp"
#include "splitwire/json_io.hpp"
#include "splitwire/payload.hpp"
#include "splitwire/planner.hpp"
#include "splitwire/tensor.hpp"
#include "splitwire/threshold_split.hpp"

namespace py = pybind11;
namespace sw = splitwire;

namespace {

sw::ActivationTensor tensor_from_array(const py::array_t<float>& arr) {
  auto buf = arr.request();
  if (buf.ndim != 2) throw std::invalid_argument("expected a 2-D float32 array");
  auto rows = static_cast<uint32_t>(buf.shape[0]);
  auto cols = static_cast<uint32_t>(buf.shape[1]);
  auto view = arr.unchecked<2>();
  std::vector<float> data;
  data.reserve(size_t(rows) * cols);
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c) data.push_back(view(r, c));
  return sw::make_tensor(rows, cols, std::move(data));
}

py::array_t<float> tensor_to_array(const sw::ActivationTensor& t) {
  py::array_t<float> arr({size_t(t.rows()), size_t(t.cols())});
  auto view = arr.mutable_unchecked<2>();
  for (uint32_t r = 0; r < t.rows(); ++r)
    for (uint32_t c = 0; c < t.cols(); ++c) view(r, c) = t.at(r, c);
  return arr;
}

sw::QuantScheme scheme_from_dict(const py::dict& d) {
  sw::QuantScheme s;
  s.split_layer = d["split_layer"].cast<uint32_t>();
  s.qw1 = d["qw1"].cast<uint32_t>();
  s.qw2 = d["qw2"].cast<uint32_t>();
  s.qa1 = d["qa1"].cast<uint32_t>();
  s.qa2 = d["qa2"].cast<uint32_t>();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Split-computing activation compression toolkit";

  py::class_<sw::OutlierStats>(m, "OutlierStats")
      .def(py::init([](float threshold, double fraction, float bulk_scale) {
             return sw::OutlierStats{threshold, fraction, bulk_scale};
           }),
           py::arg("threshold") = 100.0f, py::arg("fraction") = 5e-6,
           py::arg("bulk_scale") = 0.5f)
      .def_readwrite("threshold", &sw::OutlierStats::outlier_threshold)
      .def_readwrite("fraction", &sw::OutlierStats::outlier_fraction)
      .def_readwrite("bulk_scale", &sw::OutlierStats::bulk_scale);

  m.def(
      "synth_activations",
      [](uint32_t rows, uint32_t cols, const sw::OutlierStats& stats, uint64_t seed) {
        return tensor_to_array(sw::synth_activations(rows, cols, stats, seed));
      },
      py::arg("rows"), py::arg("cols"), py::arg("stats") = sw::fig4_default_stats(),
      py::arg("seed") = 0);

  m.def(
      "compress",
      [](const py::array_t<float>& arr, float tau, uint32_t qmax, uint32_t qmin, double delta,
         bool literal_alg1, uint16_t heads, uint16_t layer, bool kv_slice) {
        sw::ActivationTensor t = tensor_from_array(arr);
        if (heads == 0 || t.cols() % heads != 0)
          throw std::invalid_argument("heads must divide the tensor width");
        sw::TabqConfig cfg{qmax, qmin, delta, literal_alg1};
        sw::PayloadMeta meta;
        meta.kv_slice = kv_slice;
        meta.layer = layer;
        meta.heads = heads;
        meta.head_dim = static_cast<uint16_t>(t.cols() / heads);
        auto bytes = sw::payload_to_bytes(sw::compress(t, tau, cfg, meta));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("tensor"), py::arg("tau") = 5.0f, py::arg("qmax") = 4, py::arg("qmin") = 2,
      py::arg("delta") = 0.2, py::arg("literal_alg1") = false, py::arg("heads") = 1,
      py::arg("layer") = 0, py::arg("kv_slice") = false);

  m.def("decompress", [](const py::bytes& blob) {
    std::string s = blob;
    std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    return tensor_to_array(sw::decompress(sw::payload_from_bytes(bytes)));
  });

  m.def("payload_size_bytes", [](const py::bytes& blob) {
    std::string s = blob;
    std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    return sw::payload_from_bytes(bytes).size_bytes();
  });

  m.def(
      "threshold_split_nnz",
      [](const py::array_t<float>& arr, float tau) {
        return sw::threshold_split(tensor_from_array(arr), tau).above.nnz();
      },
      py::arg("tensor"), py::arg("tau"));

  m.def(
      "opsc_memory_bytes",
      [](const std::string& preset, const py::dict& scheme) {
        return sw::opsc_memory_bytes(sw::load_profile(preset), scheme_from_dict(scheme));
      },
      py::arg("profile"), py::arg("scheme"));

  m.def(
      "kv_cache_bits",
      [](uint32_t w, uint32_t ell, const std::string& preset, const py::dict& scheme) {
        return sw::kv_cache_bits(w, ell, sw::load_profile(preset), scheme_from_dict(scheme));
      },
      py::arg("w"), py::arg("ell"), py::arg("profile"), py::arg("scheme"));

  m.def(
      "io_bits",
      [](uint32_t w, uint32_t ell, int i_kv, const std::string& preset, const py::dict& scheme) {
        return sw::io_bits(w, ell, i_kv, sw::load_profile(preset), scheme_from_dict(scheme));
      },
      py::arg("w"), py::arg("ell"), py::arg("i_kv"), py::arg("profile"), py::arg("scheme"));

  m.def(
      "psi",
      [](const std::string& preset, const py::dict& scheme) {
        return sw::psi(sw::load_profile(preset), scheme_from_dict(scheme));
      },
      py::arg("profile"), py::arg("scheme"));

  py::class_<sw::ChannelParams>(m, "ChannelParams")
      .def(py::init([](double epsilon, double bandwidth_hz, double snr, double sigma_h2,
                       double r_min, double r_max) {
             return sw::ChannelParams{epsilon, bandwidth_hz, snr, sigma_h2, r_min, r_max};
           }),
           py::arg("epsilon") = 1e-3, py::arg("bandwidth_hz") = 1e7, py::arg("snr") = 10.0,
           py::arg("sigma_h2") = 1.0, py::arg("r_min") = 1e6, py::arg("r_max") = 1e8)
      .def_readwrite("epsilon", &sw::ChannelParams::epsilon)
      .def_readwrite("bandwidth_hz", &sw::ChannelParams::bandwidth_hz)
      .def_readwrite("snr", &sw::ChannelParams::snr)
      .def_readwrite("sigma_h2", &sw::ChannelParams::sigma_h2)
      .def_readwrite("r_min", &sw::ChannelParams::r_min)
      .def_readwrite("r_max", &sw::ChannelParams::r_max);

  m.def("outage_prob", &sw::outage_prob, py::arg("rate"), py::arg("channel"));
  m.def("epsilon_latency", &sw::epsilon_latency, py::arg("d_tx_bits"), py::arg("rate"),
        py::arg("channel"));
  m.def(
      "optimal_rate",
      [](const sw::ChannelParams& params, const std::string& mode) {
        return sw::optimal_rate(params,
                                mode == "paper-g" ? sw::RateMode::kPaperG : sw::RateMode::kDirect);
      },
      py::arg("channel"), py::arg("mode") = "direct");

  m.def(
      "simulate",
      [](const std::string& scenario_json) {
        sw::SimulationScenario scenario =
            sw::scenario_from_json(nlohmann::json::parse(scenario_json));
        py::list out;
        sw::PayloadSizer sizer(scenario.inputs);
        for (double deadline : scenario.deadlines_s) {
          sw::EarlyExitInputs inputs = scenario.inputs;
          inputs.budget.deadline_s = deadline;
          sw::ExitDecision d = sw::early_exit(inputs, sizer);
          sw::OffloadAccounting acc = sw::offload_accounting(d, scenario.request_tokens);
          py::dict rec;
          rec["tokens_sent"] = d.tokens_sent;
          rec["exit_layer"] = d.exit_layer;
          rec["i_kv"] = d.i_kv;
          rec["payload_bits"] = d.payload_bits;
          rec["total_latency_s"] = d.total_latency_s;
          rec["depth"] = d.depth;
          rec["edge_tokens"] = acc.edge_tokens;
          rec["server_tokens"] = acc.server_tokens;
          out.append(rec);
        }
        return out;
      },
      py::arg("scenario_json"));

  m.def(
      "plan",
      [](const std::string& profile, const std::string& accuracy_csv, double acc_base,
         double acc_delta, uint64_t memory_cap_bytes, uint32_t max_tokens,
         bool interpolate_nearest) {
        sw::ModelProfile p = sw::load_profile(profile);
        std::istringstream csv(accuracy_csv);
        sw::AccuracyTable table = sw::accuracy_table_from_csv(csv, acc_base, acc_delta);
        sw::PlannerOptions options;
        options.interpolate_nearest = interpolate_nearest;
        sw::DeploymentPlan plan =
            sw::plan(p, table, sw::PlanConstraints{memory_cap_bytes, max_tokens}, options);
        py::dict out;
        py::dict scheme;
        scheme["split_layer"] = plan.scheme.split_layer;
        scheme["qw1"] = plan.scheme.qw1;
        scheme["qw2"] = plan.scheme.qw2;
        scheme["qa1"] = plan.scheme.qa1;
        scheme["qa2"] = plan.scheme.qa2;
        out["scheme"] = scheme;
        out["psi"] = plan.psi;
        out["memory_used_bytes"] = plan.memory_used_bytes;
        out["accuracy"] = plan.accuracy;
        return out;
      },
      py::arg("profile"), py::arg("accuracy_csv"), py::arg("acc_base"), py::arg("acc_delta"),
      py::arg("memory_cap_bytes"), py::arg("max_tokens"), py::arg("interpolate_nearest") = false);

  py::register_exception<sw::InfeasiblePlanError>(m, "InfeasiblePlanError");
  py::register_exception<sw::BudgetUnsatisfiableError>(m, "BudgetUnsatisfiableError");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
