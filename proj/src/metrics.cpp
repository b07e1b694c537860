#include "flycap/metrics.hpp"

#include "flycap/errors.hpp"
#include "flycap/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace flycap {

double soc_spread(std::span<const double> soc) {
    if (soc.size() < 2) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(soc.begin(), soc.end());
    return *hi - *lo;
}

double soc_spread(const PackState& pack) {
    std::vector<double> z;
    z.reserve(pack.cells.size());
    for (const auto& c : pack.cells) {
        z.push_back(c.soc);
    }
    return soc_spread(z);
}

namespace {

// First row at or after the rest onset.
std::optional<std::size_t> rest_row(const SimTrace& trace, double onset) {
    for (std::size_t k = 0; k < trace.rows(); ++k) {
        if (trace.time[k] >= onset) {
            return k;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<double> settling_time(const SimTrace& trace, double threshold, double tolerance) {
    if (!(tolerance >= 0.0)) {
        throw ConfigError("settling_time: tolerance must be >= 0");
    }
    const auto onset = rest_onset(trace);
    if (!onset) {
        return std::nullopt;
    }
    const auto first = rest_row(trace, *onset);
    if (!first) {
        return std::nullopt;
    }
    const std::size_t n = trace.rows();
    const double limit = threshold + tolerance;
    if (soc_spread(trace.soc_row(n - 1)) >= limit) {
        return std::nullopt;
    }
    std::optional<std::size_t> last_above;
    for (std::size_t k = *first; k < n; ++k) {
        if (soc_spread(trace.soc_row(k)) >= limit) {
            last_above = k;
        }
    }
    if (!last_above) {
        return 0.0;
    }
    return (trace.time[*last_above + 1] - *onset) / 3600.0;
}

double energy_efficiency(const SimTrace& trace) {
    if (trace.rows() == 0) {
        throw ConfigError("energy_efficiency: empty trace");
    }
    const double transferred = trace.transfer_energy_j.back();
    const double lost = trace.loss_energy_j.back();
    if (!(transferred > 0.0)) {
        throw ConfigError("energy_efficiency: no energy was transferred by the balancer");
    }
    return (transferred - lost) / transferred;
}

VoltageReport voltage_convergence_report(const SimTrace& trace) {
    VoltageReport rep;
    const std::size_t n = trace.rows();
    if (n == 0) {
        return rep;
    }
    std::size_t first = 0;
    if (const auto onset = rest_onset(trace)) {
        first = rest_row(trace, *onset).value_or(0);
    }
    const auto v0 = trace.voltage_row(first);
    const auto v1 = trace.voltage_row(n - 1);
    for (std::size_t c = 0; c < trace.cell_count(); ++c) {
        VoltageRow row;
        row.label = cell_label({c / trace.cells_per_string, c % trace.cells_per_string}, trace.cells_per_string);
        row.initial_v = v0[c];
        row.final_v = v1[c];
        row.delta_mv = std::abs(v1[c] - v0[c]) * 1e3;
        row.percent = std::abs(v1[c] - v0[c]) / std::abs(v0[c]) * 100.0;
        rep.rows.push_back(row);
    }
    auto band = [](std::span<const double> v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return (*hi - *lo) * 1e3;
    };
    rep.initial_band_mv = band(v0);
    rep.final_band_mv = band(v1);
    return rep;
}

MetricsSummary summarize(const SimTrace& trace, double threshold) {
    trace.validate();
    MetricsSummary m;
    m.threshold = threshold;
    if (trace.rows() == 0) {
        return m;
    }
    const auto onset = rest_onset(trace);
    std::size_t first = 0;
    if (onset) {
        m.rest_onset_h = *onset / 3600.0;
        first = rest_row(trace, *onset).value_or(0);
    }
    m.initial_spread = soc_spread(trace.soc_row(first));
    m.final_spread = soc_spread(trace.soc_row(trace.rows() - 1));
    m.settling_h = settling_time(trace, threshold);
    m.transfer_energy_j = trace.transfer_energy_j.back();
    m.loss_energy_j = trace.loss_energy_j.back();
    if (m.transfer_energy_j > 0.0) {
        m.efficiency = energy_efficiency(trace);
    }
    m.switch_events = trace.events.size();
    m.voltages = voltage_convergence_report(trace);
    return m;
}

std::string metrics_csv(const MetricsSummary& m) {
    std::ostringstream os;
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    os << "metric,value\n";
    os << "threshold," << format_double(m.threshold) << '\n';
    os << "rest_onset_h," << opt(m.rest_onset_h) << '\n';
    os << "initial_spread," << format_double(m.initial_spread) << '\n';
    os << "final_spread," << format_double(m.final_spread) << '\n';
    os << "settling_h," << opt(m.settling_h) << '\n';
    os << "efficiency," << opt(m.efficiency) << '\n';
    os << "transfer_energy_J," << format_double(m.transfer_energy_j) << '\n';
    os << "loss_energy_J," << format_double(m.loss_energy_j) << '\n';
    os << "switch_events," << m.switch_events << '\n';
    os << "initial_band_mV," << format_double(m.voltages.initial_band_mv) << '\n';
    os << "final_band_mV," << format_double(m.voltages.final_band_mv) << '\n';
    return os.str();
}

std::string metrics_text(const MetricsSummary& m) {
    std::ostringstream os;
    char buf[160];
    auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        os << buf << '\n';
    };
    line("SoC threshold        %.4f", m.threshold);
    if (m.rest_onset_h) {
        line("rest onset           %.4f h", *m.rest_onset_h);
    } else {
        os << "rest onset           none\n";
    }
    line("initial SoC spread   %.4f %%", m.initial_spread * 100.0);
    line("final SoC spread     %.4f %%", m.final_spread * 100.0);
    if (m.settling_h) {
        line("settling time        %.4f h", *m.settling_h);
    } else {
        os << "settling time        not settled\n";
    }
    if (m.efficiency) {
        line("energy efficiency    %.6f", *m.efficiency);
    } else {
        os << "energy efficiency    n/a (no transfer)\n";
    }
    line("switch events        %zu", m.switch_events);
    os << '\n';
    line("%-8s %-15s %-13s %-10s %s", "Battery", "Initial voltage", "Final voltage", "Delta (mV)", "% difference");
    for (const auto& r : m.voltages.rows) {
        line("%-8s %-15.4f %-13.4f %-10.2f %.4f", r.label.c_str(), r.initial_v, r.final_v, r.delta_mv, r.percent);
    }
    line("voltage band: %.2f mV -> %.2f mV", m.voltages.initial_band_mv, m.voltages.final_band_mv);
    return os.str();
}

} // namespace flycap
