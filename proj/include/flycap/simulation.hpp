#pragma once

// Drives a pack through a current profile with the equalizer attached:
// per step the controller picks its connection and capacitor current, then
// the pack solves its string split with that current injected and advances.

#include "flycap/balancer.hpp"
#include "flycap/pack.hpp"
#include "flycap/profile.hpp"
#include "flycap/trace.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace flycap {

struct Scenario {
    PackConfig pack;
    std::vector<double> initial_soc;
    CurrentProfile profile;
    BalancerConfig balancer;
    bool balancing = true;

    void validate(double dt) const;
};

struct SimOptions {
    double dt = 0.1;
    double record_interval_s = 10.0;
    /// Defaults to the profile duration; past the end the last sample holds.
    std::optional<double> end_time_s;
    /// Stop once the controller has been idle on a balanced pack at rest for
    /// this long.
    std::optional<double> stop_after_balanced_s;
};

/// Per-step hook: state after the step, commanded current, injections applied.
using StepObserver = std::function<void(const PackState&, double, std::span<const Injection>)>;

struct SimResult {
    SimTrace trace;
    PackState final_state;
    BalancerState final_balancer;
    std::size_t steps = 0;
    double max_kcl_residual = 0.0; ///< max over steps of |sum alpha - I| / max(1, |I|)
};

[[nodiscard]] SimResult simulate(const Scenario& scenario, const SimOptions& options,
                                 const StepObserver& observer = {});

} // namespace flycap
