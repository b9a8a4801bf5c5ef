#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slimegate/circuit.hpp"
#include "slimegate/config.hpp"
#include "slimegate/experiments.hpp"
#include "slimegate/gates.hpp"
#include "slimegate/gateway.hpp"
#include "slimegate/records.hpp"
#include "slimegate/scene_config.hpp"

namespace py = pybind11;
using namespace slimegate;

namespace {

GateKind gate_kind(const std::string& name) {
    const auto kind = gate_kind_from_string(name);
    if (!kind) throw py::value_error("gate must be 'pnot' or 'pnand'");
    return *kind;
}

Calibration calibration_arg(const std::optional<std::string>& text) {
    return text ? calibration_from_config(*text) : Calibration{};
}

RunSpec run_spec(const std::string& gate, const InputBits& inputs, std::uint64_t seed, std::optional<long> budget,
                 const std::optional<std::string>& script, const std::optional<std::string>& scene,
                 const std::optional<std::string>& calibration) {
    RunSpec spec;
    spec.kind = gate_kind(gate);
    spec.inputs = inputs;
    spec.seed = seed;
    spec.budget = budget;
    if (script) spec.script = parse_script(*script);
    spec.scene_text = scene;
    spec.calibration = calibration_arg(calibration);
    check_inputs(harness_for(spec), spec.inputs);
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optically coupled slime-mould logic gate simulator";
    m.attr("__version__") = std::string(kToolVersion);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<GateError>(m, "GateError", PyExc_ValueError);
    py::register_exception<RecordError>(m, "RecordError", PyExc_ValueError);
    py::register_exception<NetlistError>(m, "NetlistError", PyExc_ValueError);
    py::register_exception<ExperimentError>(m, "ExperimentError", PyExc_ValueError);

    m.def("default_calibration", [] { return emit_calibration(Calibration{}); },
          "Shipped calibration as config text.");
    m.def("calibration_digest", [](const std::string& text) { return calibration_digest(calibration_from_config(text)); },
          py::arg("text"));
    m.def(
        "gate_scene",
        [](const std::string& gate, double gap, double supply) {
            const GateKind kind = gate_kind(gate);
            return emit_config((kind == GateKind::pnot ? build_pnot(gap, supply) : build_pnand(gap, supply)).scene);
        },
        py::arg("gate"), py::arg("gap") = 10.0, py::arg("supply") = 9.0, "Default gate layout as scene config text.");

    m.def(
        "run",
        [](const std::string& gate, const InputBits& inputs, std::uint64_t seed, std::optional<long> budget,
           const std::optional<std::string>& script, const std::optional<std::string>& scene,
           const std::optional<std::string>& calibration) {
            const RunSpec spec = run_spec(gate, inputs, seed, budget, script, scene, calibration);
            py::gil_scoped_release release;
            return execute_run(spec).record;
        },
        py::arg("gate"), py::arg("inputs"), py::arg("seed") = 1, py::arg("budget") = py::none(),
        py::arg("script") = py::none(), py::arg("scene") = py::none(), py::arg("calibration") = py::none(),
        "Runs one gate and returns its JSON-lines record.");

    m.def(
        "replay",
        [](const std::string& record) {
            ReplayReport r;
            {
                py::gil_scoped_release release;
                r = replay_record(record);
            }
            return py::make_tuple(r.match, r.recorded, r.replayed);
        },
        py::arg("record"), "Re-executes a record: (match, recorded summary, replayed summary).");

    m.def(
        "campaign",
        [](const std::string& name, int trials, std::uint64_t seed, const std::string& gate, std::optional<long> budget,
           const std::string& variable, const std::vector<double>& levels,
           const std::optional<std::string>& calibration) {
            CampaignSpec spec;
            const auto c = campaign_from_string(name);
            if (!c) throw py::value_error("unknown campaign '" + name + "'");
            spec.campaign = *c;
            spec.trials = trials;
            spec.seed = seed;
            spec.kind = gate_kind(gate);
            spec.budget = budget;
            const auto v = fault_variable_from_string(variable);
            if (!v) throw py::value_error("variable must be luminosity, gap or voltage");
            spec.variable = *v;
            spec.levels = levels;
            spec.calibration = calibration_arg(calibration);
            py::gil_scoped_release release;
            const CampaignResult r = execute_campaign(spec);
            return std::make_pair(r.record, r.summary);
        },
        py::arg("name"), py::arg("trials") = 40, py::arg("seed") = 1, py::arg("gate") = "pnot",
        py::arg("budget") = py::none(), py::arg("variable") = "gap", py::arg("levels") = std::vector<double>{},
        py::arg("calibration") = py::none(), "Runs a campaign: (JSON-lines record, summary table).");

    m.def(
        "cascade",
        [](const std::optional<std::string>& netlist, double dish) {
            const CascadeEstimate e = estimate_cascade(netlist ? parse_netlist(*netlist) : half_adder_netlist(), dish);
            py::dict d;
            d["gates"] = e.gates;
            d["area_m2"] = e.area_m2;
            d["depth"] = e.depth;
            d["delay_ticks"] = e.delay_ticks;
            return d;
        },
        py::arg("netlist") = py::none(), py::arg("dish") = 90.0);

    m.def(
        "network_resistance",
        [](int nodes, const std::vector<std::tuple<int, int, double>>& edges, int a, int b) {
            ConductiveNetwork net;
            for (int i = 0; i < nodes; ++i) net.add_node("N" + std::to_string(i), {});
            for (const auto& [x, y, g] : edges) {
                if (x < 0 || y < 0 || x >= nodes || y >= nodes) throw py::index_error("edge endpoint out of range");
                net.add_edge(x, y, 1.0, g);
            }
            if (a < 0 || b < 0 || a >= nodes || b >= nodes) throw py::index_error("terminal out of range");
            return network_resistance(net, a, b);
        },
        py::arg("nodes"), py::arg("edges"), py::arg("a"), py::arg("b"),
        "Two-terminal resistance of (a, b, conductance) edges; None when open.");

    m.def(
        "z_test",
        [](int x1, int n1, int x2, int n2) {
            const ZTest t = two_proportion_z_test(x1, n1, x2, n2);
            return py::make_tuple(t.z, t.p);
        },
        py::arg("x1"), py::arg("n1"), py::arg("x2"), py::arg("n2"), "Pooled two-proportion z-test: (z, p).");

    m.def(
        "downsample",
        [](const std::vector<double>& values, int w, int h, int max_side) {
            if (w <= 0 || h <= 0 || values.size() != static_cast<std::size_t>(w) * h) {
                throw py::value_error("values must hold w * h cells");
            }
            const Downsampled d = downsample(values, w, h, max_side);
            return py::make_tuple(d.w, d.h, d.cells);
        },
        py::arg("values"), py::arg("w"), py::arg("h"), py::arg("max_side") = kMaxSnapshotSide);
}
