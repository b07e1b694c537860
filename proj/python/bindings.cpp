#include "flycap/balancer.hpp"
#include "flycap/cell.hpp"
#include "flycap/config.hpp"
#include "flycap/errors.hpp"
#include "flycap/metrics.hpp"
#include "flycap/pack.hpp"
#include "flycap/simulation.hpp"
#include "flycap/sweep.hpp"
#include "flycap/trace_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace flycap;

namespace {

py::dict metrics_dict(const MetricsSummary& m) {
    py::dict d;
    d["threshold"] = m.threshold;
    d["rest_onset_h"] = m.rest_onset_h;
    d["initial_spread"] = m.initial_spread;
    d["final_spread"] = m.final_spread;
    d["settling_h"] = m.settling_h;
    d["efficiency"] = m.efficiency;
    d["transfer_energy_J"] = m.transfer_energy_j;
    d["loss_energy_J"] = m.loss_energy_j;
    d["switch_events"] = m.switch_events;
    d["initial_band_mV"] = m.voltages.initial_band_mv;
    d["final_band_mV"] = m.voltages.final_band_mv;
    py::list rows;
    for (const auto& r : m.voltages.rows) {
        py::dict row;
        row["battery"] = r.label;
        row["initial_V"] = r.initial_v;
        row["final_V"] = r.final_v;
        row["delta_mV"] = r.delta_mv;
        row["percent"] = r.percent;
        rows.append(row);
    }
    d["voltages"] = rows;
    return d;
}

py::dict trace_dict(const SimTrace& t) {
    py::dict d;
    d["n_strings"] = t.n_strings;
    d["cells_per_string"] = t.cells_per_string;
    d["time_s"] = t.time;
    d["soc"] = t.soc;
    d["voltage"] = t.voltage;
    d["alpha"] = t.alpha;
    d["v_cap"] = t.v_cap;
    d["i_c"] = t.i_c;
    py::list events;
    for (const auto& e : t.events) {
        events.append(py::make_tuple(e.time, py::make_tuple(e.from.string, e.from.position),
                                     py::make_tuple(e.to.string, e.to.position), e.v_cap));
    }
    d["events"] = events;
    return d;
}

py::dict row_dict(const SweepRow& r) {
    py::dict d;
    d["cap_F"] = r.cap_f;
    d["res_ohm"] = r.res_ohm;
    d["delta"] = r.delta;
    d["settling_h"] = r.settling_h;
    d["efficiency"] = r.efficiency;
    d["final_spread"] = r.final_spread;
    d["status"] = r.status;
    return d;
}

ConfigOverrides overrides(std::optional<std::uint64_t> seed, std::optional<double> dt) {
    ConfigOverrides o;
    o.seed = seed;
    o.dt = dt;
    return o;
}

} // namespace

PYBIND11_MODULE(_flycap, m) {
    m.doc() = "Flying-capacitor balancing simulator for parallel/series Li-ion packs";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationFault>(m, "SimulationFault", PyExc_RuntimeError);

    m.def(
        "open_circuit_voltage", [](double z) { return open_circuit_voltage(z, reference_cell().ocv); }, py::arg("soc"),
        "Open-circuit voltage of the reference cell");
    m.def("capacitor_current", &capacitor_current, py::arg("v_b"), py::arg("v_cap_start"), py::arg("res"),
          py::arg("cap"), py::arg("t"));
    m.def("capacitor_voltage_update", &capacitor_voltage_update, py::arg("v_cap_start"), py::arg("v_b"),
          py::arg("res"), py::arg("cap"), py::arg("t"));
    m.def(
        "solve_current_split",
        [](const std::vector<double>& phis, const std::vector<double>& gammas, double current) {
            return solve_current_split(phis, gammas, current).alpha;
        },
        py::arg("phis"), py::arg("gammas"), py::arg("total_current"),
        "String currents giving equal string voltages and summing to the pack current");

    m.def(
        "simulate",
        [](const std::filesystem::path& config, std::optional<std::uint64_t> seed, std::optional<double> dt) {
            const auto rc = load_run_config(config, overrides(seed, dt));
            SimResult r;
            {
                py::gil_scoped_release release;
                r = simulate(rc.scenario, rc.sim);
            }
            py::dict out;
            out["trace"] = trace_dict(r.trace);
            out["metrics"] = metrics_dict(summarize(r.trace, rc.scenario.balancer.soc_threshold));
            out["steps"] = r.steps;
            out["max_kcl_residual"] = r.max_kcl_residual;
            return out;
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("dt") = py::none(),
        "Run a JSON config; returns the sampled trace and its metrics");

    m.def(
        "sweep",
        [](const std::filesystem::path& config, unsigned workers, std::optional<std::uint64_t> seed) {
            const auto rc = load_run_config(config, overrides(seed, std::nullopt));
            if (!rc.sweep) {
                throw ConfigError(config.string() + " has no sweep block");
            }
            std::vector<SweepRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_sweep(*rc.sweep, workers);
            }
            py::list out;
            for (const auto& r : rows) {
                out.append(row_dict(r));
            }
            return out;
        },
        py::arg("config"), py::arg("workers") = 1, py::arg("seed") = py::none(),
        "Run the sweep block of a JSON config; one dict per grid point in grid order");

    m.def(
        "report",
        [](const std::filesystem::path& trace_csv, double threshold) {
            return metrics_dict(summarize(load_trace(trace_csv), threshold));
        },
        py::arg("trace_csv"), py::arg("threshold") = 0.02, "Metrics of a stored trace.csv");
}
