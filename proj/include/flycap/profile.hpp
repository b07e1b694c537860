#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <vector>

namespace flycap {

/// Piecewise-constant pack current. Sample k holds from time[k] until
/// time[k+1]; the last sample holds from its time onward.
struct CurrentProfile {
    std::vector<double> time;    ///< seconds, strictly increasing, time[0] == 0
    std::vector<double> current; ///< amps, positive discharges the pack

    [[nodiscard]] double duration() const { return time.empty() ? 0.0 : time.back(); }
    [[nodiscard]] double current_at(double t) const;
    /// Start of the trailing zero-current window, if it has positive length.
    [[nodiscard]] std::optional<double> rest_onset() const;

    void validate() const;
};

/// Two-column CSV (time_s, current_A); a non-numeric first line is a header.
[[nodiscard]] CurrentProfile parse_profile(std::istream& in);
[[nodiscard]] CurrentProfile load_profile(const std::filesystem::path& path);

struct DriveCycleSpec {
    double active_hours = 0.5;
    double rest_hours = 12.0;
    double mean_depletion_a = 2.4;
    double pulse_period_s = 20.0;
    double pulse_amplitude_a = 30.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Charge-depleting square-pulse cycle followed by a zero-current rest.
/// Each full pulse period spends half its time at mean + a*u and half at
/// mean - a*u, u ~ U[0.5, 1) per period, so every period nets exactly
/// mean * period; a trailing partial period runs at the mean.
[[nodiscard]] CurrentProfile synth_drive_cycle(const DriveCycleSpec& spec);

/// All-zero profile of the given length.
[[nodiscard]] CurrentProfile rest_profile(double seconds);

} // namespace flycap
