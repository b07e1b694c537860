#include "flycap/simulation.hpp"

#include "flycap/errors.hpp"
#include "flycap/metrics.hpp"

#include <cmath>

namespace flycap {

void Scenario::validate(double dt) const {
    pack.validate();
    profile.validate();
    balancer.validate();
    if (balancing) {
        balancer.validate_timestep(dt);
    } else if (!(dt > 0.0)) {
        throw ConfigError("dt must be > 0");
    }
    if (initial_soc.size() != pack.cell_count()) {
        throw ConfigError("scenario: initial SoC list must have one entry per cell");
    }
}

namespace {

class TraceRecorder {
public:
    explicit TraceRecorder(const PackConfig& cfg) : cfg_(cfg) {
        trace_.n_strings = cfg.n_strings;
        trace_.cells_per_string = cfg.cells_per_string;
    }

    void record(const PackState& s, std::span<const Injection> injections, const BalancerState& bal,
                double target_current, double transfer_j, double loss_j, bool open_circuit = false) {
        trace_.time.push_back(s.time);
        for (std::size_t k = 0; k < s.cells.size(); ++k) {
            double ib = s.alpha.empty() || open_circuit ? 0.0 : s.alpha[k / cfg_.cells_per_string];
            for (const auto& inj : open_circuit ? std::span<const Injection>{} : injections) {
                if (cfg_.flat(inj.cell) == k) {
                    ib += inj.current;
                }
            }
            trace_.soc.push_back(s.cells[k].soc);
            trace_.voltage.push_back(terminal_voltage(s.cells[k], cfg_.cells[k], ib));
        }
        for (std::size_t i = 0; i < cfg_.n_strings; ++i) {
            trace_.alpha.push_back(s.alpha.empty() ? 0.0 : s.alpha[i]);
        }
        trace_.v_cap.push_back(bal.v_cap);
        trace_.i_c.push_back(target_current);
        trace_.target_string.push_back(bal.target ? static_cast<int>(bal.target->string) : -1);
        trace_.target_pos.push_back(bal.target ? static_cast<int>(bal.target->position) : -1);
        trace_.transfer_energy_j.push_back(transfer_j);
        trace_.loss_energy_j.push_back(loss_j);
    }

    SimTrace& trace() { return trace_; }

private:
    const PackConfig& cfg_;
    SimTrace trace_;
};

} // namespace

SimResult simulate(const Scenario& scenario, const SimOptions& options, const StepObserver& observer) {
    const double dt = options.dt;
    scenario.validate(dt);
    if (!(options.record_interval_s > 0.0)) {
        throw ConfigError("record_interval_s must be > 0");
    }
    const PackConfig& pack = scenario.pack;
    const BalancerConfig& bcfg = scenario.balancer;

    const double end_time = options.end_time_s.value_or(scenario.profile.duration());
    const auto steps = static_cast<std::size_t>(std::llround(end_time / dt));
    if (steps == 0) {
        throw ConfigError("simulation shorter than one step");
    }
    const auto record_every = static_cast<std::size_t>(std::max(1LL, std::llround(options.record_interval_s / dt)));
    std::optional<std::size_t> rest_step;
    if (auto r = scenario.profile.rest_onset()) {
        rest_step = static_cast<std::size_t>(std::llround(*r / dt));
    }

    SimResult result;
    PackState state = make_pack_state(pack, scenario.initial_soc);
    BalancerState bal = initial_balancer_state(bcfg);
    TraceRecorder rec(pack);
    double transfer_j = 0.0;
    double loss_j = 0.0;
    rec.record(state, {}, bal, 0.0, transfer_j, loss_j);

    std::vector<SwitchEvent> events;
    double balanced_since = -1.0;
    std::size_t s = 0;
    for (; s < steps; ++s) {
        state.time = static_cast<double>(s) * dt;
        const double current = scenario.profile.current_at(state.time);

        BalancerStep b;
        if (scenario.balancing) {
            b = balancer_step(bal, bcfg, state, pack, dt, current);
            bal = b.state;
            transfer_j += b.transfer_energy_j;
            loss_j += b.loss_j;
            events.insert(events.end(), b.events.begin(), b.events.end());
        }

        PackState next = step_pack(state, pack, current, dt, b.injections);
        next.time = static_cast<double>(s + 1) * dt;

        double sum = 0.0;
        for (double a : next.alpha) {
            sum += a;
        }
        result.max_kcl_residual =
            std::max(result.max_kcl_residual, std::abs(sum - current) / std::max(1.0, std::abs(current)));

        if (observer) {
            observer(next, current, b.injections);
        }

        bool stop = false;
        if (options.stop_after_balanced_s && std::abs(current) <= bcfg.no_load_threshold_a &&
            soc_spread(next) < bcfg.soc_threshold + kSettlingTolerance) {
            if (balanced_since < 0.0) {
                balanced_since = next.time;
            }
            stop = next.time - balanced_since >= *options.stop_after_balanced_s;
        } else {
            balanced_since = -1.0;
        }

        const bool last = stop || s + 1 == steps;
        const bool onset = rest_step && s + 1 == *rest_step;
        if ((s + 1) % record_every == 0 || last || onset) {
            rec.record(next, b.injections, bal, b.target_current, transfer_j, loss_j, onset);
        }
        state = std::move(next);
        if (stop) {
            ++s;
            break;
        }
    }

    result.steps = s;
    result.trace = std::move(rec.trace());
    result.trace.events = std::move(events);
    result.final_state = std::move(state);
    result.final_balancer = bal;
    return result;
}

} // namespace flycap
