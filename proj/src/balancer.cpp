#include "flycap/balancer.hpp"

#include "flycap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flycap {

void BalancerConfig::validate() const {
    if (!(cap_f > 0.0) || !std::isfinite(cap_f)) {
        throw ConfigError("balancer: cap_F must be > 0");
    }
    if (!(res_ohm > 0.0) || !std::isfinite(res_ohm)) {
        throw ConfigError("balancer: res_ohm must be > 0");
    }
    if (!(switch_factor > 0.0) || !std::isfinite(switch_factor)) {
        throw ConfigError("balancer: switch_factor must be > 0");
    }
    if (!(soc_threshold > 0.0 && soc_threshold < 1.0)) {
        throw ConfigError("balancer: soc_threshold must be in (0, 1)");
    }
    if (!std::isfinite(v_cap_init)) {
        throw ConfigError("balancer: v_cap_init must be finite");
    }
    if (!(no_load_threshold_a >= 0.0)) {
        throw ConfigError("balancer: no_load_threshold_A must be >= 0");
    }
    if (switch_dead_steps < 0) {
        throw ConfigError("balancer: switch_dead_steps must be >= 0");
    }
    if (inrush_limit_a && !(*inrush_limit_a > 0.0)) {
        throw ConfigError("balancer: inrush_limit_A must be > 0 when set");
    }
}

void BalancerConfig::validate_timestep(double dt) const {
    if (!(dt > 0.0)) {
        throw ConfigError("dt must be > 0");
    }
    const double period = phase_duration();
    if (dt > period * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "dt = " << dt << " s exceeds the balancer switch period switch_factor*R*C = " << period
           << " s; need dt <= switch_factor*R*C";
        throw ConfigError(os.str());
    }
}

std::string_view to_string(Phase p) noexcept {
    switch (p) {
    case Phase::Idle:
        return "idle";
    case Phase::ChargingFromMax:
        return "charging_from_max";
    case Phase::DischargingIntoMin:
        return "discharging_into_min";
    case Phase::Switching:
        return "switching";
    }
    return "?";
}

BalancerState initial_balancer_state(const BalancerConfig& cfg) {
    BalancerState s;
    s.v_cap = cfg.v_cap_init;
    s.v_cap_at_phase_start = cfg.v_cap_init;
    return s;
}

ExtremeCells select_extreme_cells(const PackState& pack, const PackConfig& cfg) {
    if (pack.cells.empty()) {
        throw ConfigError("select_extreme_cells: empty pack");
    }
    std::size_t hi = 0;
    std::size_t lo = 0;
    for (std::size_t k = 1; k < pack.cells.size(); ++k) {
        if (pack.cells[k].soc > pack.cells[hi].soc) {
            hi = k;
        }
        if (pack.cells[k].soc < pack.cells[lo].soc) {
            lo = k;
        }
    }
    return {cfg.index_of(hi), cfg.index_of(lo)};
}

bool is_balanced(const PackState& pack, double threshold) {
    if (pack.cells.empty()) {
        return true;
    }
    const auto [lo, hi] = std::minmax_element(pack.cells.begin(), pack.cells.end(),
                                              [](const CellState& a, const CellState& b) { return a.soc < b.soc; });
    return hi->soc - lo->soc < threshold;
}

double capacitor_current(double v_b, double v_cap_start, double res, double cap, double t) {
    return (v_b - v_cap_start) / res * std::exp(-t / (res * cap));
}

double capacitor_voltage_update(double v_cap_start, double v_b, double res, double cap, double t) {
    return v_b - (v_b - v_cap_start) * std::exp(-t / (res * cap));
}

ConnectionSegment connect_segment(double v_cap_start, double v_b, double res, double cap, double duration,
                                  std::optional<double> current_limit) {
    ConnectionSegment out;
    double v0 = v_cap_start;
    double remaining = duration;

    // Current-limited ramp until the gap falls to limit * R.
    if (current_limit && std::abs(v_b - v0) > *current_limit * res) {
        const double sign = v_b > v0 ? 1.0 : -1.0;
        const double limit = *current_limit;
        const double ramp_time = cap * (std::abs(v_b - v0) - limit * res) / limit;
        const double t = std::min(ramp_time, remaining);
        const double q = sign * limit * t;
        out.charge_c += q;
        out.source_energy_j += v_b * q;
        out.loss_j += limit * limit * res * t;
        v0 += q / cap;
        remaining -= t;
        if (remaining <= 0.0) {
            out.v_cap_end = v0;
            return out;
        }
    }

    const double gap = v_b - v0;
    const double decay = std::exp(-remaining / (res * cap));
    const double q = cap * gap * (1.0 - decay);
    out.v_cap_end = v_b - gap * decay;
    out.charge_c += q;
    out.source_energy_j += v_b * q;
    out.loss_j += 0.5 * cap * gap * gap * (1.0 - decay * decay);
    return out;
}

namespace {

struct CellCharge {
    CellIndex cell;
    double coulombs = 0.0;
};

void add_charge(std::vector<CellCharge>& acc, CellIndex c, double q) {
    for (auto& e : acc) {
        if (e.cell == c) {
            e.coulombs += q;
            return;
        }
    }
    acc.push_back({c, q});
}

bool connected(Phase p) { return p == Phase::ChargingFromMax || p == Phase::DischargingIntoMin; }

} // namespace

BalancerStep balancer_step(const BalancerState& state, const BalancerConfig& cfg, const PackState& pack,
                           const PackConfig& pack_cfg, double dt, double pack_current) {
    BalancerStep out;
    out.state = state;
    auto& st = out.state;

    auto go_idle = [&] {
        st.phase = Phase::Idle;
        st.target.reset();
        st.phase_elapsed = 0.0;
        st.switch_remaining = 0.0;
        st.next_phase = Phase::ChargingFromMax;
    };

    if (std::abs(pack_current) > cfg.no_load_threshold_a) {
        if (st.phase != Phase::Idle) {
            go_idle();
        }
        return out;
    }

    const double period = cfg.phase_duration();
    const double dead_time = cfg.switch_dead_steps * dt;
    const double eps = 1e-9 * std::max(dt, 1.0);
    double t = pack.time;
    double remaining = dt;
    std::vector<CellCharge> charge;

    auto begin_phase = [&](Phase kind) {
        const bool was_active = st.phase != Phase::Idle;
        if (is_balanced(pack, cfg.soc_threshold)) {
            go_idle();
            out.completed = was_active;
            return false;
        }
        const auto ex = select_extreme_cells(pack, pack_cfg);
        st.phase = kind;
        st.target = kind == Phase::ChargingFromMax ? ex.max : ex.min;
        st.phase_elapsed = 0.0;
        st.switch_remaining = 0.0;
        st.v_cap_at_phase_start = st.v_cap;
        out.events.push_back({t, ex.max, ex.min, st.v_cap});
        return true;
    };

    if (st.phase == Phase::Idle && !begin_phase(Phase::ChargingFromMax)) {
        return out;
    }

    while (remaining > eps) {
        if (connected(st.phase) && st.phase_elapsed >= period - eps) {
            const Phase next = st.phase == Phase::ChargingFromMax ? Phase::DischargingIntoMin : Phase::ChargingFromMax;
            if (dead_time > 0.0) {
                st.phase = Phase::Switching;
                st.target.reset();
                st.switch_remaining = dead_time;
                st.next_phase = next;
            } else if (!begin_phase(next)) {
                break;
            }
            continue;
        }
        if (st.phase == Phase::Switching) {
            if (st.switch_remaining <= eps) {
                if (!begin_phase(st.next_phase)) {
                    break;
                }
                continue;
            }
            const double seg = std::min(remaining, st.switch_remaining);
            st.switch_remaining -= seg;
            remaining -= seg;
            t += seg;
            continue;
        }
        if (!connected(st.phase)) {
            break;
        }

        const CellIndex cell = *st.target;
        const double string_current = pack.alpha.empty() ? 0.0 : pack.alpha[cell.string];
        const double v_b = terminal_voltage(pack.cell(pack_cfg, cell), pack_cfg.cell(cell), string_current);
        const double seg = std::min(remaining, period - st.phase_elapsed);
        const auto s = connect_segment(st.v_cap, v_b, cfg.res_ohm, cfg.cap_f, seg, cfg.inrush_limit_a);

        st.v_cap = s.v_cap_end;
        add_charge(charge, cell, s.charge_c);
        if (st.phase == Phase::ChargingFromMax) {
            out.transfer_energy_j += s.source_energy_j;
        }
        out.loss_j += s.loss_j;
        st.phase_elapsed += seg;
        remaining -= seg;
        t += seg;
    }

    out.injections.reserve(charge.size());
    for (const auto& c : charge) {
        out.injections.push_back({c.cell, c.coulombs / dt});
        if (st.target && c.cell == *st.target) {
            out.target_current = c.coulombs / dt;
        }
    }
    return out;
}

} // namespace flycap
