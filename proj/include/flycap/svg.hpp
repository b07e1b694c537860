#pragma once

// Minimal static SVG line charts for traces.

#include "flycap/trace.hpp"

#include <string>
#include <vector>

namespace flycap {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool step = false; ///< draw as zero-order hold
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 960;
    int height = 540;
    std::size_t max_points = 4000; ///< per series; longer series are strided
};

[[nodiscard]] std::string line_chart_svg(const ChartSpec& spec, const std::vector<Series>& series);

/// Per-cell SoC (%) against time (h).
[[nodiscard]] std::string soc_chart_svg(const SimTrace& trace);
/// Per-cell terminal voltage against time (h).
[[nodiscard]] std::string voltage_chart_svg(const SimTrace& trace);
/// Source and sink cell numbers of each switch event against time (h).
[[nodiscard]] std::string switching_chart_svg(const SimTrace& trace);

} // namespace flycap
