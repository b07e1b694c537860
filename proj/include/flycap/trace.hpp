#pragma once

#include "flycap/balancer.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace flycap {

/// Time-sampled record of a simulation. Per-cell series are row-major
/// (one row per sample, string-major cells within a row).
struct SimTrace {
    std::size_t n_strings = 0;
    std::size_t cells_per_string = 0;

    std::vector<double> time;
    std::vector<double> soc;
    /// Terminal voltage under the cell current of the step ending at the
    /// sample, except at the rest onset sample: load has just ended and the
    /// balancer is not yet connected, so it holds the zero-current voltage.
    std::vector<double> voltage;
    std::vector<double> alpha;
    std::vector<double> v_cap;
    std::vector<double> i_c;
    std::vector<int> target_string; ///< -1 when nothing is connected
    std::vector<int> target_pos;
    /// Running totals of balancer energy (transferred from source cells, and
    /// dissipated), accumulated at full step resolution.
    std::vector<double> transfer_energy_j;
    std::vector<double> loss_energy_j;

    std::vector<SwitchEvent> events;

    [[nodiscard]] std::size_t cell_count() const noexcept { return n_strings * cells_per_string; }
    [[nodiscard]] std::size_t rows() const noexcept { return time.size(); }
    [[nodiscard]] std::span<const double> soc_row(std::size_t k) const {
        return std::span<const double>(soc).subspan(k * cell_count(), cell_count());
    }
    [[nodiscard]] std::span<const double> voltage_row(std::size_t k) const {
        return std::span<const double>(voltage).subspan(k * cell_count(), cell_count());
    }
    [[nodiscard]] std::span<const double> alpha_row(std::size_t k) const {
        return std::span<const double>(alpha).subspan(k * n_strings, n_strings);
    }

    /// Throws ConfigError when series lengths disagree or time decreases.
    void validate() const;
};

/// Start of the rest window: the earliest sample after which every later
/// sample carries zero pack current (|sum of string currents| <= 1 mA).
/// Empty when the trace ends under load.
[[nodiscard]] std::optional<double> rest_onset(const SimTrace& trace);

} // namespace flycap
