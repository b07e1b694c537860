#pragma once

#include "flycap/trace.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flycap {

/// max(z) - min(z); 0 for fewer than two cells.
[[nodiscard]] double soc_spread(std::span<const double> soc);
[[nodiscard]] double soc_spread(const PackState& pack);

/// A spread counts as back above the threshold only when it exceeds it by
/// more than this. A controller that re-arms at the threshold holds the
/// spread within a few 1e-6 of it while mesh currents relax.
inline constexpr double kSettlingTolerance = 1e-5;

/// Hours from rest onset until the spread drops below `threshold` for good.
/// Empty ("not settled") when the trace has no rest window or ends above
/// threshold + tolerance.
[[nodiscard]] std::optional<double> settling_time(const SimTrace& trace, double threshold,
                                                  double tolerance = kSettlingTolerance);

/// (transferred - lost) / transferred over the whole trace. Throws
/// ConfigError when no energy was transferred.
[[nodiscard]] double energy_efficiency(const SimTrace& trace);

struct VoltageRow {
    std::string label;
    double initial_v = 0.0;
    double final_v = 0.0;
    double delta_mv = 0.0;
    double percent = 0.0;
};

struct VoltageReport {
    std::vector<VoltageRow> rows;
    double initial_band_mv = 0.0; ///< max - min of initial voltages
    double final_band_mv = 0.0;
};

/// Per-cell terminal voltage at the rest onset sample against the final
/// sample.
[[nodiscard]] VoltageReport voltage_convergence_report(const SimTrace& trace);

struct MetricsSummary {
    std::optional<double> rest_onset_h;
    double initial_spread = 0.0; ///< at the first rest sample (or first sample without rest)
    double final_spread = 0.0;
    std::optional<double> settling_h;
    std::optional<double> efficiency;
    double transfer_energy_j = 0.0;
    double loss_energy_j = 0.0;
    std::size_t switch_events = 0;
    double threshold = 0.02;
    VoltageReport voltages;
};

[[nodiscard]] MetricsSummary summarize(const SimTrace& trace, double threshold);

/// "metric,value" CSV; absent values are written as empty fields.
[[nodiscard]] std::string metrics_csv(const MetricsSummary& m);
/// Human-readable report including the voltage table.
[[nodiscard]] std::string metrics_text(const MetricsSummary& m);

} // namespace flycap
