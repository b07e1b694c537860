#pragma once

#include "flycap/trace.hpp"

#include <vector>

namespace flycap::testing {

/// One string of `soc_rows[k].size()` cells. `load[k]` is the pack current of
/// row k; voltages are 3.3 V plus 1 V per unit SoC.
inline SimTrace synthetic_trace(const std::vector<double>& time, const std::vector<std::vector<double>>& soc_rows,
                                const std::vector<double>& load) {
    SimTrace t;
    t.n_strings = 1;
    t.cells_per_string = soc_rows.front().size();
    double e = 0.0;
    for (std::size_t k = 0; k < time.size(); ++k) {
        t.time.push_back(time[k]);
        for (double z : soc_rows[k]) {
            t.soc.push_back(z);
            t.voltage.push_back(3.3 + (z - 0.6));
        }
        t.alpha.push_back(load[k]);
        t.v_cap.push_back(3.3);
        t.i_c.push_back(0.0);
        t.target_string.push_back(-1);
        t.target_pos.push_back(-1);
        e += 1.0;
        t.transfer_energy_j.push_back(e * 10.0);
        t.loss_energy_j.push_back(e * 0.5);
    }
    return t;
}

} // namespace flycap::testing
