#include "flycap/config.hpp"

#include "flycap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

namespace flycap {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(where) + "." + key + ": wrong type");
    }
}

template <typename T>
std::optional<T> get_opt(const json& obj, const char* key, std::string_view where) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return std::nullopt;
    }
    return get_or<T>(obj, key, T{}, where);
}

std::vector<double> number_list(const json& obj, const char* key, std::string_view where) {
    if (!obj.contains(key)) {
        throw ConfigError(std::string(where) + "." + key + " is required");
    }
    const auto& v = obj.at(key);
    if (!v.is_array()) {
        throw ConfigError(std::string(where) + "." + key + ": expected a list of numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) {
            throw ConfigError(std::string(where) + "." + key + ": expected a list of numbers");
        }
        out.push_back(x.get<double>());
    }
    if (out.empty()) {
        throw ConfigError(std::string(where) + "." + key + ": list must not be empty");
    }
    return out;
}

CellParams parse_cell(const json& j) {
    CellParams p = reference_cell();
    if (j.is_null()) {
        return p;
    }
    check_keys(j, "pack.cell", {"r0_ohm", "r1_ohm", "rate1_per_s", "r2_ohm", "rate2_per_s", "capacity_Ah", "ocv"});
    p.r0 = get_or(j, "r0_ohm", p.r0, "pack.cell");
    p.r1 = get_or(j, "r1_ohm", p.r1, "pack.cell");
    p.rate1 = get_or(j, "rate1_per_s", p.rate1, "pack.cell");
    p.r2 = get_or(j, "r2_ohm", p.r2, "pack.cell");
    p.rate2 = get_or(j, "rate2_per_s", p.rate2, "pack.cell");
    p.capacity_ah = get_or(j, "capacity_Ah", p.capacity_ah, "pack.cell");
    if (j.contains("ocv")) {
        const auto& o = j.at("ocv");
        check_keys(o, "pack.cell.ocv", {"v0", "low_amp", "low_rate", "slope", "high_amp", "high_rate"});
        p.ocv.v0 = get_or(o, "v0", p.ocv.v0, "pack.cell.ocv");
        p.ocv.low_amp = get_or(o, "low_amp", p.ocv.low_amp, "pack.cell.ocv");
        p.ocv.low_rate = get_or(o, "low_rate", p.ocv.low_rate, "pack.cell.ocv");
        p.ocv.slope = get_or(o, "slope", p.ocv.slope, "pack.cell.ocv");
        p.ocv.high_amp = get_or(o, "high_amp", p.ocv.high_amp, "pack.cell.ocv");
        p.ocv.high_rate = get_or(o, "high_rate", p.ocv.high_rate, "pack.cell.ocv");
    }
    p.validate();
    return p;
}

BalancerConfig parse_balancer(const json& j, bool& enabled) {
    BalancerConfig b;
    enabled = true;
    if (j.is_null()) {
        return b;
    }
    check_keys(j, "balancer",
               {"enabled", "cap_F", "res_ohm", "switch_factor", "soc_threshold", "v_cap_init_V",
                "no_load_threshold_A", "switch_dead_steps", "inrush_limit_A"});
    enabled = get_or(j, "enabled", true, "balancer");
    b.cap_f = get_or(j, "cap_F", b.cap_f, "balancer");
    b.res_ohm = get_or(j, "res_ohm", b.res_ohm, "balancer");
    b.switch_factor = get_or(j, "switch_factor", b.switch_factor, "balancer");
    b.soc_threshold = get_or(j, "soc_threshold", b.soc_threshold, "balancer");
    b.v_cap_init = get_or(j, "v_cap_init_V", b.v_cap_init, "balancer");
    b.no_load_threshold_a = get_or(j, "no_load_threshold_A", b.no_load_threshold_a, "balancer");
    b.switch_dead_steps = get_or(j, "switch_dead_steps", b.switch_dead_steps, "balancer");
    b.inrush_limit_a = get_opt<double>(j, "inrush_limit_A", "balancer");
    b.validate();
    return b;
}

CurrentProfile parse_profile_block(const json& j, std::uint64_t seed, bool force_seed,
                                   const std::filesystem::path& base_dir) {
    if (j.is_null()) {
        throw ConfigError("profile block is required");
    }
    const auto type = get_or<std::string>(j, "type", "drive_cycle", "profile");
    if (type == "drive_cycle") {
        check_keys(j, "profile",
                   {"type", "active_hours", "rest_hours", "mean_depletion_A", "pulse_period_s", "pulse_amplitude_A",
                    "seed"});
        DriveCycleSpec d;
        d.active_hours = get_or(j, "active_hours", d.active_hours, "profile");
        d.rest_hours = get_or(j, "rest_hours", d.rest_hours, "profile");
        d.mean_depletion_a = get_or(j, "mean_depletion_A", d.mean_depletion_a, "profile");
        d.pulse_period_s = get_or(j, "pulse_period_s", d.pulse_period_s, "profile");
        d.pulse_amplitude_a = get_or(j, "pulse_amplitude_A", d.pulse_amplitude_a, "profile");
        d.seed = force_seed ? seed : get_or<std::uint64_t>(j, "seed", seed, "profile");
        return synth_drive_cycle(d);
    }
    if (type == "csv") {
        check_keys(j, "profile", {"type", "path"});
        const auto path = get_opt<std::string>(j, "path", "profile");
        if (!path) {
            throw ConfigError("profile.path is required for type 'csv'");
        }
        std::filesystem::path p(*path);
        return load_profile(p.is_absolute() ? p : base_dir / p);
    }
    if (type == "rest") {
        check_keys(j, "profile", {"type", "hours"});
        return rest_profile(get_or(j, "hours", 12.0, "profile") * 3600.0);
    }
    throw ConfigError("profile.type must be one of drive_cycle, csv, rest (got '" + type + "')");
}

} // namespace

std::vector<double> spread_initial_soc(std::size_t cells, double mean, double spread, std::uint64_t seed) {
    if (!(mean > 0.0 && mean < 1.0) || !(spread >= 0.0)) {
        throw ConfigError("initial_soc: need 0 < mean < 1 and spread >= 0");
    }
    std::vector<double> z(cells, mean);
    if (spread == 0.0 || cells < 2) {
        return z;
    }
    std::mt19937_64 rng(seed);
    std::vector<double> u(cells);
    for (auto& x : u) {
        x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    const double u_lo = *lo;
    const double u_hi = *hi;
    const double mid = 0.5 * (u_lo + u_hi);
    for (std::size_t k = 0; k < cells; ++k) {
        z[k] = mean + spread * (u[k] - mid) / (u_hi - u_lo);
        if (!(z[k] > 0.0 && z[k] < 1.0)) {
            throw ConfigError("initial_soc: mean +/- spread/2 leaves (0, 1)");
        }
    }
    return z;
}

RunConfig parse_run_config(std::string_view json_text, const ConfigOverrides& overrides,
                           const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        const auto upto = json_text.substr(0, std::min<std::size_t>(e.byte, json_text.size()));
        const auto line = static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n')) + 1;
        throw ParseError(std::string("config: ") + e.what(), line);
    }
    check_keys(root, "config",
               {"seed", "output_dir", "pack", "initial_soc", "profile", "balancer", "simulation", "sweep",
                "description"});

    RunConfig rc;
    rc.seed = overrides.seed.value_or(get_or<std::uint64_t>(root, "seed", 0, "config"));
    rc.output_dir = overrides.output_dir.value_or(get_or<std::string>(root, "output_dir", "out", "config"));

    // Pack.
    const json pack = root.value("pack", json::object());
    check_keys(pack, "pack", {"strings", "cells_per_string", "cell", "perturbation", "seed"});
    const auto n = get_or<std::size_t>(pack, "strings", 3, "pack");
    const auto m = get_or<std::size_t>(pack, "cells_per_string", 4, "pack");
    const CellParams base = parse_cell(pack.value("cell", json()));
    const double perturbation = get_or(pack, "perturbation", 0.05, "pack");
    const auto pack_seed = overrides.seed ? rc.seed : get_or<std::uint64_t>(pack, "seed", rc.seed, "pack");
    if (n < 1 || m < 1) {
        throw ConfigError("pack: strings and cells_per_string must be >= 1");
    }
    rc.scenario.pack = make_pack(n, m, base, perturbation, pack_seed);

    // Initial state of charge.
    const json init = root.value("initial_soc", json::object({{"mean", 0.6}}));
    check_keys(init, "initial_soc", {"mean", "spread", "seed", "values"});
    if (init.contains("values")) {
        rc.scenario.initial_soc = number_list(init, "values", "initial_soc");
        if (rc.scenario.initial_soc.size() != rc.scenario.pack.cell_count()) {
            throw ConfigError("initial_soc.values: need one value per cell (" +
                              std::to_string(rc.scenario.pack.cell_count()) + ")");
        }
        for (double z : rc.scenario.initial_soc) {
            if (!(z > 0.0 && z < 1.0)) {
                throw ConfigError("initial_soc.values: every value must lie in (0, 1)");
            }
        }
    } else {
        const auto soc_seed =
            overrides.seed ? rc.seed + 1 : get_or<std::uint64_t>(init, "seed", rc.seed + 1, "initial_soc");
        rc.scenario.initial_soc = spread_initial_soc(rc.scenario.pack.cell_count(), get_or(init, "mean", 0.6, "initial_soc"),
                                                     get_or(init, "spread", 0.0, "initial_soc"), soc_seed);
    }

    const json prof = root.value("profile", json());
    rc.scenario.profile = parse_profile_block(prof, rc.seed + 2, overrides.seed.has_value(), base_dir);

    rc.scenario.balancer = parse_balancer(root.value("balancer", json()), rc.scenario.balancing);

    const json sim = root.value("simulation", json::object());
    check_keys(sim, "simulation", {"dt_s", "record_interval_s", "end_hours", "stop_after_balanced_s"});
    rc.sim.dt = overrides.dt.value_or(get_or(sim, "dt_s", 0.1, "simulation"));
    rc.sim.record_interval_s = get_or(sim, "record_interval_s", 10.0, "simulation");
    if (auto h = get_opt<double>(sim, "end_hours", "simulation")) {
        rc.sim.end_time_s = *h * 3600.0;
    }
    rc.sim.stop_after_balanced_s = get_opt<double>(sim, "stop_after_balanced_s", "simulation");
    rc.scenario.validate(rc.sim.dt);

    if (root.contains("sweep")) {
        const auto& sw = root.at("sweep");
        check_keys(sw, "sweep",
                   {"kind", "cap_F", "res_ohm", "switch_factor", "threshold", "max_sim_hours",
                    "stop_after_balanced_s", "soc_a", "soc_b", "v_cap_init_V", "window_hours"});
        const auto kind = get_or<std::string>(sw, "kind", "settling", "sweep");
        if (kind == "settling") {
            SweepSpec s;
            s.cap_values = number_list(sw, "cap_F", "sweep");
            s.res_values = number_list(sw, "res_ohm", "sweep");
            s.delta_values = number_list(sw, "switch_factor", "sweep");
            s.scenario = rc.scenario;
            s.sim = rc.sim;
            s.threshold = get_or(sw, "threshold", rc.scenario.balancer.soc_threshold, "sweep");
            s.max_sim_hours = get_or(sw, "max_sim_hours", 48.0, "sweep");
            if (sw.contains("stop_after_balanced_s")) {
                s.stop_after_balanced_s = get_opt<double>(sw, "stop_after_balanced_s", "sweep");
            }
            s.validate();
            rc.sweep = std::move(s);
        } else if (kind == "efficiency") {
            EfficiencyStudySpec e;
            e.cap_values = number_list(sw, "cap_F", "sweep");
            e.res_values = number_list(sw, "res_ohm", "sweep");
            e.delta_values = number_list(sw, "switch_factor", "sweep");
            e.cell = base;
            e.soc_a = get_or(sw, "soc_a", e.soc_a, "sweep");
            e.soc_b = get_or(sw, "soc_b", e.soc_b, "sweep");
            e.v_cap_init = get_or(sw, "v_cap_init_V", e.v_cap_init, "sweep");
            e.window_hours = get_or(sw, "window_hours", e.window_hours, "sweep");
            e.threshold = get_or(sw, "threshold", rc.scenario.balancer.soc_threshold, "sweep");
            e.dt = rc.sim.dt;
            e.switch_dead_steps = rc.scenario.balancer.switch_dead_steps;
            auto spec = efficiency_sweep_spec(e);
            spec.validate();
            rc.efficiency_study = e;
            rc.sweep = std::move(spec);
        } else {
            throw ConfigError("sweep.kind must be 'settling' or 'efficiency'");
        }
    }
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), overrides, path.parent_path());
}

} // namespace flycap
