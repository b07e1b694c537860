#include "flycap/sweep.hpp"

#include "flycap/errors.hpp"
#include "flycap/metrics.hpp"
#include "flycap/trace_io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace flycap {

void SweepSpec::validate() const {
    if (cap_values.empty() || res_values.empty() || delta_values.empty()) {
        throw ConfigError("sweep: cap, res and switch_factor lists must all be nonempty");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("sweep: threshold must be in (0, 1)");
    }
    if (!(max_sim_hours > 0.0)) {
        throw ConfigError("sweep: max_sim_hours must be > 0");
    }
    for (double c : cap_values) {
        for (double r : res_values) {
            for (double d : delta_values) {
                BalancerConfig b = scenario.balancer;
                b.cap_f = c;
                b.res_ohm = r;
                b.switch_factor = d;
                b.soc_threshold = threshold;
                b.validate();
                b.validate_timestep(sim.dt);
            }
        }
    }
}

SweepRow run_point(const SweepSpec& spec, double cap, double res, double delta) {
    SweepRow row{cap, res, delta, std::nullopt, std::nullopt, 0.0, ""};
    Scenario sc = spec.scenario;
    sc.balancer.cap_f = cap;
    sc.balancer.res_ohm = res;
    sc.balancer.switch_factor = delta;
    sc.balancer.soc_threshold = spec.threshold;
    SimOptions opt = spec.sim;
    opt.end_time_s = spec.max_sim_hours * 3600.0;
    opt.stop_after_balanced_s = spec.stop_after_balanced_s;
    try {
        const auto result = simulate(sc, opt);
        const auto& tr = result.trace;
        row.settling_h = settling_time(tr, spec.threshold);
        if (tr.transfer_energy_j.back() > 0.0) {
            row.efficiency = energy_efficiency(tr);
        }
        row.final_spread = soc_spread(tr.soc_row(tr.rows() - 1));
        row.status = row.settling_h ? "settled" : "not_settled";
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned workers) {
    spec.validate();
    std::vector<std::tuple<double, double, double>> grid;
    grid.reserve(spec.size());
    for (double c : spec.cap_values) {
        for (double r : spec.res_values) {
            for (double d : spec.delta_values) {
                grid.emplace_back(c, r, d);
            }
        }
    }
    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            const auto [c, r, d] = grid[k];
            rows[k] = run_point(spec, c, r, d);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.size())));
    if (n == 1) {
        work();
        return rows;
    }
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    return rows;
}

SweepSpec efficiency_sweep_spec(const EfficiencyStudySpec& spec) {
    SweepSpec s;
    s.cap_values = spec.cap_values;
    s.res_values = spec.res_values;
    s.delta_values = spec.delta_values;
    s.threshold = spec.threshold;
    s.max_sim_hours = spec.window_hours;
    s.stop_after_balanced_s.reset();
    s.sim.dt = spec.dt;
    s.sim.record_interval_s = 10.0;

    s.scenario.pack.n_strings = 1;
    s.scenario.pack.cells_per_string = 2;
    s.scenario.pack.cells = {spec.cell, spec.cell};
    s.scenario.initial_soc = {spec.soc_a, spec.soc_b};
    s.scenario.profile = rest_profile(spec.window_hours * 3600.0);
    s.scenario.balancer.v_cap_init = spec.v_cap_init;
    s.scenario.balancer.switch_dead_steps = spec.switch_dead_steps;
    return s;
}

std::vector<SweepRow> run_efficiency_study(const EfficiencyStudySpec& spec, unsigned workers) {
    return run_sweep(efficiency_sweep_spec(spec), workers);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    os << "cap_F,res_ohm,delta,settling_h,efficiency,final_spread,status\n";
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        os << format_double(r.cap_f) << ',' << format_double(r.res_ohm) << ',' << format_double(r.delta) << ','
           << opt(r.settling_h) << ',' << opt(r.efficiency) << ',' << format_double(r.final_spread) << ',' << status
           << '\n';
    }
    return os.str();
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != "cap_F,res_ohm,delta,settling_h,efficiency,final_spread,status") {
        throw ParseError("sweep: unexpected header", 1);
    }
    auto num = [&](const std::string& s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw ParseError("sweep: bad number '" + s + "'", line_no);
        }
        return v;
    };
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 7) {
            throw ParseError("sweep: expected 7 fields", line_no);
        }
        SweepRow r;
        r.cap_f = num(f[0]);
        r.res_ohm = num(f[1]);
        r.delta = num(f[2]);
        if (!f[3].empty()) {
            r.settling_h = num(f[3]);
        }
        if (!f[4].empty()) {
            r.efficiency = num(f[4]);
        }
        r.final_spread = num(f[5]);
        r.status = f[6];
        rows.push_back(r);
    }
    return rows;
}

namespace {

std::string describe_shape(const std::vector<std::optional<double>>& ys) {
    for (const auto& y : ys) {
        if (!y) {
            return "incomplete (a point has no value)";
        }
    }
    if (ys.size() < 2) {
        return "single point";
    }
    bool inc = true;
    bool dec = true;
    bool nondec = true;
    bool noninc = true;
    for (std::size_t k = 1; k < ys.size(); ++k) {
        inc = inc && *ys[k] > *ys[k - 1];
        dec = dec && *ys[k] < *ys[k - 1];
        nondec = nondec && *ys[k] >= *ys[k - 1];
        noninc = noninc && *ys[k] <= *ys[k - 1];
    }
    if (inc) {
        return "strictly increasing";
    }
    if (dec) {
        return "strictly decreasing";
    }
    if (nondec) {
        return "nondecreasing";
    }
    if (noninc) {
        return "nonincreasing";
    }
    const auto argmin = static_cast<std::size_t>(
        std::min_element(ys.begin(), ys.end(), [](const auto& a, const auto& b) { return *a < *b; }) - ys.begin());
    if (argmin > 0 && argmin + 1 < ys.size()) {
        return "interior minimum at point " + std::to_string(argmin + 1) + " of " + std::to_string(ys.size());
    }
    return "non-monotone";
}

struct Axis {
    const char* name;
    double SweepRow::*field;
};

constexpr Axis kAxes[] = {{"cap_F", &SweepRow::cap_f}, {"res_ohm", &SweepRow::res_ohm}, {"delta", &SweepRow::delta}};

struct Metric {
    const char* name;
    std::optional<double> SweepRow::*field;
    const char* format; ///< printf format for one value
};

void axis_report(std::ostringstream& os, const std::vector<SweepRow>& rows, std::size_t vary, const Metric& metric) {
    const Axis& a = kAxes[(vary + 1) % 3];
    const Axis& b = kAxes[(vary + 2) % 3];
    const Axis& v = kAxes[vary];
    std::map<std::pair<double, double>, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) {
        groups[{r.*(a.field), r.*(b.field)}].push_back(&r);
    }
    for (auto& [key, members] : groups) {
        if (members.size() < 2) {
            continue;
        }
        std::sort(members.begin(), members.end(),
                  [&](auto* x, auto* y) { return x->*(v.field) < y->*(v.field); });
        std::vector<std::optional<double>> ys;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s vs %s (%s=%g, %s=%g):", metric.name, v.name, a.name, key.first, b.name,
                      key.second);
        os << buf;
        for (const auto* m : members) {
            const auto& y = m->*(metric.field);
            ys.push_back(y);
            std::snprintf(buf, sizeof buf, " %g->", m->*(v.field));
            os << buf;
            if (y) {
                std::snprintf(buf, sizeof buf, metric.format, *y);
                os << buf;
            } else {
                os << "n/a";
            }
        }
        os << "  [" << describe_shape(ys) << "]\n";
    }
}

} // namespace

std::string trend_summary(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    const bool any_settled = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.settling_h.has_value(); });
    const Metric settling{"settling", &SweepRow::settling_h, "%.3fh"};
    const Metric efficiency{"efficiency", &SweepRow::efficiency, "%.5f"};
    for (std::size_t k = 0; k < 3; ++k) {
        if (any_settled) {
            axis_report(os, rows, k, settling);
        }
        axis_report(os, rows, k, efficiency);
    }
    if (os.str().empty()) {
        os << "no axis has more than one value\n";
    }
    return os.str();
}

} // namespace flycap
