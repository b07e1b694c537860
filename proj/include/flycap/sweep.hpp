#pragma once

// Grid runs over balancer (C, R, switch_factor) with everything else fixed.

#include "flycap/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flycap {

struct SweepSpec {
    std::vector<double> cap_values;
    std::vector<double> res_values;
    std::vector<double> delta_values;
    Scenario scenario;  ///< balancer C/R/delta are overwritten per grid point
    SimOptions sim;     ///< end_time_s is ignored; max_sim_hours bounds each run
    double threshold = 0.02;
    double max_sim_hours = 48.0;
    /// Early stop once balanced and idle this long; unset runs to max_sim_hours.
    std::optional<double> stop_after_balanced_s = 1800.0;

    [[nodiscard]] std::size_t size() const noexcept {
        return cap_values.size() * res_values.size() * delta_values.size();
    }
    void validate() const;
};

struct SweepRow {
    double cap_f = 0.0;
    double res_ohm = 0.0;
    double delta = 0.0;
    std::optional<double> settling_h;
    std::optional<double> efficiency;
    double final_spread = 0.0;
    std::string status; ///< "settled", "not_settled" or "error: ..."

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// One grid point exactly as a standalone simulate() would run it.
[[nodiscard]] SweepRow run_point(const SweepSpec& spec, double cap, double res, double delta);

/// Rows in cap-major, then res, then delta order regardless of `workers`.
[[nodiscard]] std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned workers = 1);

/// Two cells in series, one capacitor, a fixed observation window.
struct EfficiencyStudySpec {
    std::vector<double> cap_values{30.0, 50.0, 100.0, 180.0};
    std::vector<double> res_values{0.05, 0.1, 0.2, 0.5};
    std::vector<double> delta_values{0.5, 1.0, 2.0, 3.0};
    CellParams cell = reference_cell();
    double soc_a = 0.60;
    double soc_b = 0.695;
    double v_cap_init = 3.3;
    double window_hours = 1.0;
    double dt = 0.1;
    double threshold = 0.02;
    int switch_dead_steps = 0;
};

/// Sweep spec for the two-cell study: rest only, no early stop.
[[nodiscard]] SweepSpec efficiency_sweep_spec(const EfficiencyStudySpec& spec);
[[nodiscard]] std::vector<SweepRow> run_efficiency_study(const EfficiencyStudySpec& spec, unsigned workers = 1);

[[nodiscard]] std::string sweep_csv(const std::vector<SweepRow>& rows);
[[nodiscard]] std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// Plain-text description of how settling time (when any point settled) and
/// efficiency move along each swept axis, one line per slice.
[[nodiscard]] std::string trend_summary(const std::vector<SweepRow>& rows);

} // namespace flycap
