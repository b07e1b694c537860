// flycap: simulate a pack with the flying-capacitor equalizer, run parameter
// sweeps, and rebuild reports from stored traces.
//
// Exit status: 0 ok, 1 bad input (config, arguments, files), 2 the model
// faulted while running.

#include "flycap/config.hpp"
#include "flycap/errors.hpp"
#include "flycap/metrics.hpp"
#include "flycap/svg.hpp"
#include "flycap/sweep.hpp"
#include "flycap/trace_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace flycap;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw ConfigError("write failed: " + path.string());
    }
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    fn(out);
    if (!out) {
        throw ConfigError("write failed: " + path.string());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

void write_report(const fs::path& dir, const SimTrace& trace, double threshold) {
    const auto m = summarize(trace, threshold);
    write_file(dir / "metrics.csv", metrics_csv(m));
    write_file(dir / "report.txt", metrics_text(m));
    write_file(dir / "soc.svg", soc_chart_svg(trace));
    write_file(dir / "voltage.svg", voltage_chart_svg(trace));
    write_file(dir / "switching.svg", switching_chart_svg(trace));
    std::cout << metrics_text(m);
}

struct CommonArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
};

RunConfig load(const CommonArgs& a) {
    ConfigOverrides o;
    o.seed = a.seed;
    o.dt = a.dt;
    if (!a.out.empty()) {
        o.output_dir = a.out;
    }
    return load_run_config(a.config, o);
}

int cmd_simulate(const CommonArgs& a) {
    const RunConfig rc = load(a);
    ensure_dir(rc.output_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const SimResult r = simulate(rc.scenario, rc.sim);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_with(rc.output_dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, r.trace); });
    write_with(rc.output_dir / "events.csv", [&](std::ostream& os) { write_events_csv(os, r.trace.events); });
    write_report(rc.output_dir, r.trace, rc.scenario.balancer.soc_threshold);
    std::cerr << "simulated " << r.steps << " steps in " << secs << " s, max KCL residual " << r.max_kcl_residual
              << ", output in " << rc.output_dir.string() << '\n';
    return 0;
}

int cmd_sweep(const CommonArgs& a, unsigned workers) {
    const RunConfig rc = load(a);
    if (!rc.sweep) {
        throw ConfigError("config has no 'sweep' block");
    }
    ensure_dir(rc.output_dir);
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    const auto rows = run_sweep(*rc.sweep, workers);
    write_file(rc.output_dir / "sweep.csv", sweep_csv(rows));
    write_file(rc.output_dir / "trends.txt", trend_summary(rows));
    std::cout << sweep_csv(rows) << '\n' << trend_summary(rows);
    return 0;
}

int cmd_report(const std::string& trace_path, std::string events_path, const std::string& out, double threshold) {
    SimTrace trace = load_trace(trace_path);
    if (events_path.empty()) {
        const auto guess = fs::path(trace_path).parent_path() / "events.csv";
        if (fs::exists(guess)) {
            events_path = guess.string();
        }
    }
    if (!events_path.empty()) {
        trace.events = load_events(events_path);
    }
    const fs::path dir = out.empty() ? fs::path(trace_path).parent_path() : fs::path(out);
    ensure_dir(dir.empty() ? fs::path(".") : dir);
    write_report(dir.empty() ? fs::path(".") : dir, trace, threshold);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flying-capacitor cell equalizer simulator"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Run one scenario and write trace, metrics and plots");
    sim->add_option("-c,--config", sim_args.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sim->add_option("-o,--out", sim_args.out, "Output directory (overrides output_dir)");
    sim->add_option("--seed", sim_args.seed, "Seed for pack, initial SoC and profile");
    sim->add_option("--dt", sim_args.dt, "Integrator step in seconds");

    CommonArgs sweep_args;
    unsigned workers = 0;
    auto* sweep = app.add_subcommand("sweep", "Run the config's parameter grid");
    sweep->add_option("-c,--config", sweep_args.config, "JSON config file with a sweep block")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("-o,--out", sweep_args.out, "Output directory (overrides output_dir)");
    sweep->add_option("--seed", sweep_args.seed, "Seed for pack, initial SoC and profile");
    sweep->add_option("--dt", sweep_args.dt, "Integrator step in seconds");
    sweep->add_option("-j,--workers", workers, "Worker threads (0 = all cores)");

    std::string trace_path;
    std::string events_path;
    std::string report_out;
    double threshold = 0.02;
    auto* report = app.add_subcommand("report", "Recompute metrics and plots from a stored trace");
    report->add_option("-t,--trace", trace_path, "trace.csv from simulate")->required()->check(CLI::ExistingFile);
    report->add_option("-e,--events", events_path, "events.csv (default: next to the trace)")
        ->check(CLI::ExistingFile);
    report->add_option("-o,--out", report_out, "Output directory (default: the trace's directory)");
    report->add_option("--threshold", threshold, "SoC spread threshold for settling")->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*sim) {
            return cmd_simulate(sim_args);
        }
        if (*sweep) {
            return cmd_sweep(sweep_args, workers);
        }
        return cmd_report(trace_path, events_path, report_out, threshold);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
