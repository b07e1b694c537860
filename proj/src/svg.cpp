#include "flycap/svg.hpp"

#include "flycap/pack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace flycap {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
double nice_step(double span, int target) {
    if (!(span > 0.0)) {
        return 1.0;
    }
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, double step) {
    char buf[32];
    const int digits = std::max(0, static_cast<int>(-std::floor(std::log10(step))));
    std::snprintf(buf, sizeof buf, "%.*f", std::min(digits, 6), v);
    return buf;
}

double hours(double s) { return s / 3600.0; }

} // namespace

std::string line_chart_svg(const ChartSpec& spec, const std::vector<Series>& series) {
    const double left = 80.0;
    const double right = 170.0;
    const double top = 40.0;
    const double bottom = 60.0;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;

    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 == x0) {
        x1 = x0 + 1.0;
    }
    if (y1 == y0) {
        y0 -= 0.5 * std::max(1e-3, std::abs(y0) * 1e-3);
        y1 += 0.5 * std::max(1e-3, std::abs(y1) * 1e-3);
    }
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">" << escape(spec.title)
       << "</text>\n";

    const double xs = nice_step(x1 - x0, 8);
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        os << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(sx(t)) << "\" y2=\""
           << num(top + ph) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
           << tick_label(t, xs) << "</text>\n";
    }
    const double ys = nice_step(y1 - y0, 6);
    for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-9 * ys; v += ys) {
        os << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
           << num(sy(v)) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(v) + 4) << "\" text-anchor=\"end\">"
           << tick_label(v, ys) << "</text>\n";
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << spec.height - 15 << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(20 " << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(spec.y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        const std::size_t stride = std::max<std::size_t>(1, (s.x.size() + spec.max_points - 1) / spec.max_points);
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        double prev_y = 0.0;
        for (std::size_t k = 0; k < s.x.size(); k += stride) {
            if (s.step && k > 0) {
                os << num(sx(s.x[k])) << ',' << num(sy(prev_y)) << ' ';
            }
            os << num(sx(s.x[k])) << ',' << num(sy(s.y[k])) << ' ';
            prev_y = s.y[k];
        }
        os << "\"/>\n";
        const double ly = top + 14.0 + 16.0 * static_cast<double>(si);
        os << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + pw + 32)
           << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << num(left + pw + 38) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

namespace {

std::vector<Series> per_cell(const SimTrace& trace, const std::vector<double>& values, double scale) {
    std::vector<Series> out(trace.cell_count());
    for (std::size_t c = 0; c < trace.cell_count(); ++c) {
        out[c].label = cell_label({c / trace.cells_per_string, c % trace.cells_per_string}, trace.cells_per_string);
        out[c].x.reserve(trace.rows());
        out[c].y.reserve(trace.rows());
    }
    for (std::size_t k = 0; k < trace.rows(); ++k) {
        for (std::size_t c = 0; c < trace.cell_count(); ++c) {
            out[c].x.push_back(hours(trace.time[k]));
            out[c].y.push_back(values[k * trace.cell_count() + c] * scale);
        }
    }
    return out;
}

} // namespace

std::string soc_chart_svg(const SimTrace& trace) {
    return line_chart_svg({"Cell state of charge", "time (h)", "SoC (%)"}, per_cell(trace, trace.soc, 100.0));
}

std::string voltage_chart_svg(const SimTrace& trace) {
    return line_chart_svg({"Cell terminal voltage", "time (h)", "voltage (V)"}, per_cell(trace, trace.voltage, 1.0));
}

std::string switching_chart_svg(const SimTrace& trace) {
    Series src{"source (max SoC)", {}, {}, true};
    Series dst{"sink (min SoC)", {}, {}, true};
    const auto m = trace.cells_per_string;
    for (const auto& e : trace.events) {
        src.x.push_back(hours(e.time));
        src.y.push_back(static_cast<double>(e.from.string * m + e.from.position + 1));
        dst.x.push_back(hours(e.time));
        dst.y.push_back(static_cast<double>(e.to.string * m + e.to.position + 1));
    }
    return line_chart_svg({"Balancer switching", "time (h)", "cell number"}, {src, dst});
}

} // namespace flycap
