#include "flycap/trace_io.hpp"

#include "flycap/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace flycap {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view s, std::string_view column, std::size_t line) {
    T v{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw ParseError("bad value '" + std::string(s) + "' in column " + std::string(column), line);
    }
    return v;
}

std::string cell_suffix(std::size_t i, std::size_t j) { return std::to_string(i) + "_" + std::to_string(j); }

} // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    trace.validate();
    const std::size_t n = trace.n_strings;
    const std::size_t m = trace.cells_per_string;
    out << "time_s";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out << ",z_" << cell_suffix(i, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out << ",v_" << cell_suffix(i, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out << ",alpha_" << i;
    }
    out << ",v_cap_V,i_c_A,target_i,target_j,e_transfer_J,e_loss_J\n";

    for (std::size_t k = 0; k < trace.rows(); ++k) {
        std::string row = format_double(trace.time[k]);
        for (double z : trace.soc_row(k)) {
            row += ',';
            row += format_double(z);
        }
        for (double v : trace.voltage_row(k)) {
            row += ',';
            row += format_double(v);
        }
        for (double a : trace.alpha_row(k)) {
            row += ',';
            row += format_double(a);
        }
        row += ',' + format_double(trace.v_cap[k]) + ',' + format_double(trace.i_c[k]) + ',' +
               std::to_string(trace.target_string[k]) + ',' + std::to_string(trace.target_pos[k]) + ',' +
               format_double(trace.transfer_energy_j[k]) + ',' + format_double(trace.loss_energy_j[k]);
        out << row << '\n';
    }
}

SimTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("trace: empty file", 1);
    }
    const auto header_fields = split(line);
    std::vector<std::string> header(header_fields.begin(), header_fields.end());

    std::size_t z_cols = 0;
    std::size_t n = 0;
    for (const auto& h : header) {
        if (h.rfind("z_", 0) == 0) {
            ++z_cols;
        } else if (h.rfind("alpha_", 0) == 0) {
            ++n;
        }
    }
    if (n == 0 || z_cols == 0 || z_cols % n != 0) {
        throw ParseError("trace: header lacks z_<i>_<j> / alpha_<i> columns", 1);
    }
    SimTrace t;
    t.n_strings = n;
    t.cells_per_string = z_cols / n;
    const std::size_t cells = z_cols;

    // Rebuild the expected header and insist on an exact match.
    std::vector<std::string> expected{"time_s"};
    for (const char* prefix : {"z_", "v_"}) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < t.cells_per_string; ++j) {
                expected.push_back(prefix + cell_suffix(i, j));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        expected.push_back("alpha_" + std::to_string(i));
    }
    for (const char* c : {"v_cap_V", "i_c_A", "target_i", "target_j", "e_transfer_J", "e_loss_J"}) {
        expected.emplace_back(c);
    }
    if (header != expected) {
        for (std::size_t c = 0; c < expected.size(); ++c) {
            if (c >= header.size() || header[c] != expected[c]) {
                throw ParseError("trace: header column " + std::to_string(c + 1) + " should be '" + expected[c] + "'",
                                 1);
            }
        }
        throw ParseError("trace: unexpected extra header columns", 1);
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split(line);
        if (f.size() < expected.size()) {
            throw ParseError("trace: row is missing column '" + expected[f.size()] + "'", line_no);
        }
        if (f.size() > expected.size()) {
            throw ParseError("trace: row has more fields than the header", line_no);
        }
        std::size_t c = 0;
        auto num = [&] {
            const auto v = parse_field<double>(f[c], expected[c], line_no);
            ++c;
            return v;
        };
        t.time.push_back(num());
        for (std::size_t k = 0; k < cells; ++k) {
            t.soc.push_back(num());
        }
        for (std::size_t k = 0; k < cells; ++k) {
            t.voltage.push_back(num());
        }
        for (std::size_t i = 0; i < n; ++i) {
            t.alpha.push_back(num());
        }
        t.v_cap.push_back(num());
        t.i_c.push_back(num());
        t.target_string.push_back(parse_field<int>(f[c], expected[c], line_no));
        ++c;
        t.target_pos.push_back(parse_field<int>(f[c], expected[c], line_no));
        ++c;
        t.transfer_energy_j.push_back(num());
        t.loss_energy_j.push_back(num());
    }
    if (t.rows() == 0) {
        throw ParseError("trace: no samples", line_no);
    }
    t.validate();
    return t;
}

void write_events_csv(std::ostream& out, const std::vector<SwitchEvent>& events) {
    out << "time_s,from_string,from_pos,to_string,to_pos,v_cap_V\n";
    for (const auto& e : events) {
        out << format_double(e.time) << ',' << e.from.string << ',' << e.from.position << ',' << e.to.string << ','
            << e.to.position << ',' << format_double(e.v_cap) << '\n';
    }
}

std::vector<SwitchEvent> read_events_csv(std::istream& in) {
    static constexpr std::string_view kHeader = "time_s,from_string,from_pos,to_string,to_pos,v_cap_V";
    static const char* kCols[] = {"time_s", "from_string", "from_pos", "to_string", "to_pos", "v_cap_V"};
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("events: empty file", 1);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kHeader) {
        throw ParseError("events: header should be '" + std::string(kHeader) + "'", 1);
    }
    std::vector<SwitchEvent> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 6) {
            throw ParseError(f.size() < 6 ? "events: row is missing column '" + std::string(kCols[f.size()]) + "'"
                                          : "events: row has more than 6 fields",
                             line_no);
        }
        SwitchEvent e;
        e.time = parse_field<double>(f[0], kCols[0], line_no);
        e.from.string = parse_field<std::size_t>(f[1], kCols[1], line_no);
        e.from.position = parse_field<std::size_t>(f[2], kCols[2], line_no);
        e.to.string = parse_field<std::size_t>(f[3], kCols[3], line_no);
        e.to.position = parse_field<std::size_t>(f[4], kCols[4], line_no);
        e.v_cap = parse_field<double>(f[5], kCols[5], line_no);
        out.push_back(e);
    }
    return out;
}

SimTrace load_trace(const std::filesystem::path& trace_csv) {
    std::ifstream in(trace_csv);
    if (!in) {
        throw ConfigError("cannot open trace " + trace_csv.string());
    }
    try {
        return read_trace_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(trace_csv.string() + ": " + e.what());
    }
}

std::vector<SwitchEvent> load_events(const std::filesystem::path& events_csv) {
    std::ifstream in(events_csv);
    if (!in) {
        throw ConfigError("cannot open events " + events_csv.string());
    }
    try {
        return read_events_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(events_csv.string() + ": " + e.what());
    }
}

} // namespace flycap
