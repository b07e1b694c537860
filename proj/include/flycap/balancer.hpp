#pragma once

// Flying-capacitor equalizer: one R-C branch that is switched onto the
// highest-SoC cell (charging the capacitor) and then onto the lowest-SoC cell
// (discharging it), each connection lasting switch_factor * R * C seconds.

#include "flycap/pack.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace flycap {

struct BalancerConfig {
    double cap_f = 50.0;
    double res_ohm = 0.05;
    double switch_factor = 0.5;    ///< connection time in units of R*C
    double soc_threshold = 0.02;   ///< stop once max - min SoC falls below this
    double v_cap_init = 0.0;
    double no_load_threshold_a = 1e-3;
    /// Simulation steps the capacitor stays disconnected at each switch while
    /// the next pair is selected (break-before-make).
    int switch_dead_steps = 0;
    /// Optional clamp on |i_c|; unset means the unconstrained exponential.
    std::optional<double> inrush_limit_a;

    [[nodiscard]] double time_constant() const noexcept { return res_ohm * cap_f; }
    [[nodiscard]] double phase_duration() const noexcept { return switch_factor * res_ohm * cap_f; }

    void validate() const;
    /// The step must resolve one connection period.
    void validate_timestep(double dt) const;
};

enum class Phase { Idle, ChargingFromMax, DischargingIntoMin, Switching };

[[nodiscard]] std::string_view to_string(Phase p) noexcept;

struct BalancerState {
    double v_cap = 0.0;
    Phase phase = Phase::Idle;
    std::optional<CellIndex> target;  ///< connected cell; set only while charging or discharging
    double phase_elapsed = 0.0;
    double v_cap_at_phase_start = 0.0;
    double switch_remaining = 0.0;    ///< dead time left while Switching
    Phase next_phase = Phase::ChargingFromMax;
};

[[nodiscard]] BalancerState initial_balancer_state(const BalancerConfig& cfg);

/// Emitted whenever a connection starts: the capacitor is about to shuttle
/// charge from `from` (current max-SoC cell) to `to` (current min-SoC cell).
struct SwitchEvent {
    double time = 0.0;
    CellIndex from;
    CellIndex to;
    double v_cap = 0.0;

    friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

struct ExtremeCells {
    CellIndex max;
    CellIndex min;
};

/// Max- and min-SoC cells; ties go to the lowest string-major index.
[[nodiscard]] ExtremeCells select_extreme_cells(const PackState& pack, const PackConfig& cfg);

[[nodiscard]] bool is_balanced(const PackState& pack, double threshold);

/// Current out of the battery into the capacitor `t` seconds into a
/// connection that started with the capacitor at `v_cap_start`.
[[nodiscard]] double capacitor_current(double v_b, double v_cap_start, double res, double cap, double t);

/// Capacitor voltage `t` seconds into a connection to a source at `v_b`.
[[nodiscard]] double capacitor_voltage_update(double v_cap_start, double v_b, double res, double cap, double t);

/// One closed-form connected interval of the R-C branch against a fixed source.
struct ConnectionSegment {
    double v_cap_end = 0.0;
    double charge_c = 0.0;       ///< coulombs out of the battery (negative: into it)
    double source_energy_j = 0.0;///< v_b * charge
    double loss_j = 0.0;         ///< dissipated in the resistor
};

[[nodiscard]] ConnectionSegment connect_segment(double v_cap_start, double v_b, double res, double cap,
                                                double duration, std::optional<double> current_limit = {});

struct BalancerStep {
    BalancerState state;
    std::vector<Injection> injections; ///< step-averaged currents, at most one per cell
    std::vector<SwitchEvent> events;
    double transfer_energy_j = 0.0;    ///< battery-side energy drawn during ChargingFromMax intervals
    double loss_j = 0.0;               ///< resistor loss over all intervals
    double target_current = 0.0;       ///< step-averaged current of the cell connected at step end
    bool completed = false;            ///< went idle this step because the pack is balanced
};

/// Advances the controller and its capacitor by dt. Balancing only runs while
/// |pack_current| is at or below the no-load threshold; connected cells are
/// evaluated at their terminal voltage under the previous string current.
[[nodiscard]] BalancerStep balancer_step(const BalancerState& state, const BalancerConfig& cfg, const PackState& pack,
                                         const PackConfig& pack_cfg, double dt, double pack_current);

} // namespace flycap
