#pragma once

// CSV encodings of traces and switch-event logs. Doubles are written in
// shortest round-trip form, so reading a file back reproduces the values
// bit for bit.

#include "flycap/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace flycap {

[[nodiscard]] std::string format_double(double v);

/// Columns: time_s, z_<i>_<j>..., v_<i>_<j>..., alpha_<i>..., v_cap_V, i_c_A,
/// target_i, target_j, e_transfer_J, e_loss_J (indices 0-based, -1 = none).
void write_trace_csv(std::ostream& out, const SimTrace& trace);
/// Reads the samples; events are left empty.
[[nodiscard]] SimTrace read_trace_csv(std::istream& in);

/// Columns: time_s, from_string, from_pos, to_string, to_pos, v_cap_V.
void write_events_csv(std::ostream& out, const std::vector<SwitchEvent>& events);
[[nodiscard]] std::vector<SwitchEvent> read_events_csv(std::istream& in);

[[nodiscard]] SimTrace load_trace(const std::filesystem::path& trace_csv);
[[nodiscard]] std::vector<SwitchEvent> load_events(const std::filesystem::path& events_csv);

} // namespace flycap
