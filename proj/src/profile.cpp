#include "flycap/profile.hpp"

#include "flycap/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace flycap {

double CurrentProfile::current_at(double t) const {
    if (time.empty()) {
        return 0.0;
    }
    auto it = std::upper_bound(time.begin(), time.end(), t);
    if (it == time.begin()) {
        return current.front();
    }
    return current[static_cast<std::size_t>(std::distance(time.begin(), it)) - 1];
}

std::optional<double> CurrentProfile::rest_onset() const {
    if (time.empty()) {
        return std::nullopt;
    }
    std::size_t k = current.size();
    while (k > 0 && current[k - 1] == 0.0) {
        --k;
    }
    if (k == current.size() || time[k] >= duration()) {
        return std::nullopt;
    }
    return time[k];
}

void CurrentProfile::validate() const {
    if (time.empty()) {
        throw ConfigError("profile: no samples");
    }
    if (time.size() != current.size()) {
        throw ConfigError("profile: time and current lengths differ");
    }
    if (time.front() != 0.0) {
        throw ConfigError("profile: first sample must be at t = 0");
    }
    for (std::size_t k = 0; k < time.size(); ++k) {
        if (!std::isfinite(time[k]) || !std::isfinite(current[k])) {
            throw ConfigError("profile: non-finite sample");
        }
        if (k > 0 && !(time[k] > time[k - 1])) {
            throw ConfigError("profile: times must be strictly increasing");
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && !s.empty();
}

} // namespace

CurrentProfile parse_profile(std::istream& in) {
    CurrentProfile p;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto comma = body.find(',');
        double t = 0.0;
        double i = 0.0;
        const bool ok = comma != std::string_view::npos && body.find(',', comma + 1) == std::string_view::npos &&
                        parse_double(body.substr(0, comma), t) && parse_double(body.substr(comma + 1), i);
        if (!ok) {
            if (p.time.empty() && line_no == 1) {
                continue; // header
            }
            throw ParseError("profile: expected 'time_s,current_A'", line_no);
        }
        if (p.time.empty() && t != 0.0) {
            throw ParseError("profile: first sample must be at t = 0", line_no);
        }
        if (!p.time.empty() && !(t > p.time.back())) {
            throw ParseError("profile: time " + std::string(body.substr(0, comma)) + " does not increase", line_no);
        }
        if (!std::isfinite(t) || !std::isfinite(i)) {
            throw ParseError("profile: non-finite value", line_no);
        }
        p.time.push_back(t);
        p.current.push_back(i);
    }
    if (p.time.empty()) {
        throw ParseError("profile: no samples");
    }
    return p;
}

CurrentProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open profile " + path.string());
    }
    try {
        return parse_profile(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void DriveCycleSpec::validate() const {
    if (!(active_hours > 0.0) || !(rest_hours > 0.0)) {
        throw ConfigError("drive cycle: active_hours and rest_hours must be > 0");
    }
    if (!(pulse_period_s > 0.0)) {
        throw ConfigError("drive cycle: pulse_period_s must be > 0");
    }
    if (!std::isfinite(mean_depletion_a) || !(pulse_amplitude_a >= 0.0)) {
        throw ConfigError("drive cycle: mean must be finite and amplitude >= 0");
    }
}

CurrentProfile synth_drive_cycle(const DriveCycleSpec& spec) {
    spec.validate();
    const double active = spec.active_hours * 3600.0;
    const double rest = spec.rest_hours * 3600.0;
    const double half = 0.5 * spec.pulse_period_s;

    std::mt19937_64 rng(spec.seed);
    CurrentProfile p;
    const auto full_periods = static_cast<std::size_t>(std::floor(active / spec.pulse_period_s));
    for (std::size_t k = 0; k < full_periods; ++k) {
        const double u = 0.5 + 0.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double t0 = static_cast<double>(k) * spec.pulse_period_s;
        p.time.push_back(t0);
        p.current.push_back(spec.mean_depletion_a + spec.pulse_amplitude_a * u);
        p.time.push_back(t0 + half);
        p.current.push_back(spec.mean_depletion_a - spec.pulse_amplitude_a * u);
    }
    const double tail = static_cast<double>(full_periods) * spec.pulse_period_s;
    if (tail < active) {
        p.time.push_back(tail);
        p.current.push_back(spec.mean_depletion_a);
    }
    p.time.push_back(active);
    p.current.push_back(0.0);
    p.time.push_back(active + rest);
    p.current.push_back(0.0);
    return p;
}

CurrentProfile rest_profile(double seconds) {
    if (!(seconds > 0.0)) {
        throw ConfigError("rest profile: duration must be > 0");
    }
    return CurrentProfile{{0.0, seconds}, {0.0, 0.0}};
}

} // namespace flycap
