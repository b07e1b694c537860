#include "flycap/trace.hpp"

#include "flycap/errors.hpp"

#include <cmath>

namespace flycap {

void SimTrace::validate() const {
    const std::size_t n = rows();
    const bool ok = soc.size() == n * cell_count() && voltage.size() == n * cell_count() &&
                    alpha.size() == n * n_strings && v_cap.size() == n && i_c.size() == n &&
                    target_string.size() == n && target_pos.size() == n && transfer_energy_j.size() == n &&
                    loss_energy_j.size() == n;
    if (!ok) {
        throw ConfigError("trace: series lengths disagree");
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (time[k] < time[k - 1]) {
            throw ConfigError("trace: time decreases");
        }
    }
}

std::optional<double> rest_onset(const SimTrace& trace) {
    constexpr double kNoLoad = 1e-3;
    const std::size_t n = trace.rows();
    if (n == 0) {
        return std::nullopt;
    }
    auto loaded = [&](std::size_t k) {
        double sum = 0.0;
        for (double a : trace.alpha_row(k)) {
            sum += a;
        }
        return std::abs(sum) > kNoLoad;
    };
    if (loaded(n - 1)) {
        return std::nullopt;
    }
    // Row k's string currents are those of the step ending at time[k].
    std::size_t k = n - 1;
    while (k > 0 && !loaded(k)) {
        --k;
    }
    return trace.time[k];
}

} // namespace flycap
