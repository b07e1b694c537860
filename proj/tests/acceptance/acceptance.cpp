// One line per acceptance criterion; exit status 1 if any fails.

#include "flycap/balancer.hpp"
#include "flycap/config.hpp"
#include "flycap/metrics.hpp"
#include "flycap/pack.hpp"
#include "flycap/simulation.hpp"
#include "flycap/sweep.hpp"
#include "flycap/trace_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace flycap;
namespace fs = std::filesystem;

namespace {

fs::path g_configs = FLYCAP_CONFIG_DIR;
std::string g_only;
int g_failures = 0;
int g_ran = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

void report(const char* id, const char* title, const std::function<Outcome()>& check) {
    if (!g_only.empty() && g_only != id) {
        return;
    }
    ++g_ran;
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) {
        ++g_failures;
    }
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string trace_text(const SimTrace& t) {
    std::ostringstream os;
    write_trace_csv(os, t);
    return os.str();
}

SimResult run_config(const RunConfig& rc, const StepObserver& obs = {}) { return simulate(rc.scenario, rc.sim, obs); }

std::vector<double> naive_ge(const std::vector<double>& phi, const std::vector<double>& gamma, double current) {
    const std::size_t n = phi.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t r = 0; r + 1 < n; ++r) {
        m[r][r] = phi[r];
        m[r][r + 1] = -phi[r + 1];
        m[r][n] = gamma[r] - gamma[r + 1];
    }
    for (std::size_t c = 0; c < n; ++c) {
        m[n - 1][c] = 1.0;
    }
    m[n - 1][n] = current;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = m[r][k] / m[k][k];
            for (std::size_t c = k; c <= n; ++c) {
                m[r][c] -= f * m[k][c];
            }
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = m[k][n];
        for (std::size_t c = k + 1; c < n; ++c) {
            s -= m[k][c] * x[c];
        }
        x[k] = s / m[k][k];
    }
    return x;
}

std::string hours_list(const std::vector<SweepRow>& rows, double SweepRow::*axis) {
    std::string s;
    for (const auto& r : rows) {
        s += fmt("%g", r.*axis) + "->" + (r.settling_h ? fmt("%.3fh", *r.settling_h) : std::string("n/s")) + " ";
    }
    return s;
}

bool all_settled(const std::vector<SweepRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.settling_h.has_value(); });
}

Outcome strictly_increasing(const std::vector<SweepRow>& rows, double SweepRow::*axis) {
    bool ok = all_settled(rows);
    for (std::size_t k = 1; ok && k < rows.size(); ++k) {
        ok = *rows[k].settling_h > *rows[k - 1].settling_h;
    }
    return {ok, hours_list(rows, axis)};
}

} // namespace

int main(int argc, char** argv) {
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--only" && k + 1 < argc) {
            g_only = argv[++k];
        } else {
            g_configs = arg;
        }
    }
    const auto reference = load_run_config(g_configs / "reference_3p4s.json");

    // Shared by AC1, AC5, AC11 and AC12; run on first use.
    struct ReferenceRun {
        SimResult result;
        double worst_kcl = 0.0;
        double seconds = 0.0;
    };
    std::optional<ReferenceRun> ref_cache;
    auto reference_run = [&]() -> const ReferenceRun& {
        if (!ref_cache) {
            ReferenceRun rr;
            const auto t0 = std::chrono::steady_clock::now();
            rr.result = run_config(reference, [&](const PackState& s, double current, std::span<const Injection>) {
                double sum = 0.0;
                for (double a : s.alpha) {
                    sum += a;
                }
                rr.worst_kcl = std::max(rr.worst_kcl, std::abs(sum - current) / std::max(1.0, std::abs(current)));
            });
            rr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            ref_cache = std::move(rr);
        }
        return *ref_cache;
    };

    report("AC1", "KCL invariant", [&] {
        const auto& rr = reference_run();
        const auto& ref = rr.result;
        const double worst_kcl = rr.worst_kcl;
        const double ref_seconds = rr.seconds;
        const bool full = std::abs(ref.final_state.time - 12.5 * 3600.0) < 1.0;
        return Outcome{full && worst_kcl <= 1e-9 && ref_seconds <= 60.0,
                       "max |sum a - I|/max(1,|I|) = " + fmt("%.3e", worst_kcl) + " over " +
                           std::to_string(ref.steps) + " steps in " + fmt("%.2f s", ref_seconds)};
    });

    report("AC2", "split solver vs naive elimination", [&] {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> phi_d(0.05, 0.5);
        std::uniform_real_distribution<double> gam_d(12.0, 14.5);
        std::uniform_real_distribution<double> cur_d(-60.0, 60.0);
        double worst = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t n = trial % 2 == 0 ? 2 : 3;
            std::vector<double> phi(n);
            std::vector<double> gam(n);
            for (std::size_t i = 0; i < n; ++i) {
                phi[i] = phi_d(rng);
                gam[i] = gam_d(rng);
            }
            const double cur = cur_d(rng);
            const auto got = solve_current_split(phi, gam, cur).alpha;
            const auto want = naive_ge(phi, gam, cur);
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(1.0, std::abs(want[i])));
            }
        }
        return Outcome{worst <= 1e-12, "max relative difference " + fmt("%.3e", worst) + " over 500 systems"};
    });

    report("AC3", "identical strings share equally", [&] {
        Scenario sc;
        sc.pack = make_pack(3, 4, reference_cell(), 0.0, 1);
        sc.initial_soc.assign(12, 0.6);
        DriveCycleSpec d;
        d.rest_hours = 0.1;
        sc.profile = synth_drive_cycle(d);
        double worst = 0.0;
        (void)simulate(sc, {}, [&](const PackState& s, double current, std::span<const Injection>) {
            for (double a : s.alpha) {
                worst = std::max(worst, std::abs(a - current / 3.0));
            }
        });
        return Outcome{worst <= 1e-9, "max |a_i - I/3| = " + fmt("%.3e", worst) + " A"};
    });

    report("AC4", "closed-form phase vs explicit Euler at RC/1000", [&] {
        double worst = 0.0;
        for (const double cap : {20.0, 50.0, 150.0}) {
            for (const double res : {0.05, 0.2}) {
                for (const double delta : {0.5, 1.0, 2.0}) {
                    for (const auto& [v0, vb] : {std::pair{3.2, 3.3}, std::pair{3.31, 3.29}, std::pair{0.0, 3.3}}) {
                        const double h = res * cap / 1000.0;
                        const auto n = static_cast<int>(std::lround(delta * 1000.0));
                        const double i0 = std::abs(capacitor_current(vb, v0, res, cap, 0.0));
                        double v = v0;
                        for (int k = 0; k <= n; ++k) {
                            const double t = k * h;
                            const double vc = capacitor_voltage_update(v0, vb, res, cap, t);
                            const double ic = capacitor_current(vb, v0, res, cap, t);
                            worst = std::max(worst, std::abs(v - vc) / std::max(std::abs(vc), std::abs(vb)));
                            worst = std::max(worst, std::abs((vb - v) / res - ic) / i0);
                            v += h * (vb - v) / (res * cap);
                        }
                    }
                }
            }
        }
        return Outcome{worst <= 1e-3, "max relative error " + fmt("%.3e", worst)};
    });

    report("AC5", "reference run balances", [&] {
        const auto& ref = reference_run().result;
        const auto m = summarize(ref.trace, reference.scenario.balancer.soc_threshold);
        const bool ok = m.final_spread < 0.02 && m.settling_h && *m.settling_h >= 1.0 && *m.settling_h <= 20.0;
        return Outcome{ok, "spread at rest onset " + fmt("%.2f%%", m.initial_spread * 100) + ", final " +
                               fmt("%.6f%%", m.final_spread * 100) + ", settling " +
                               (m.settling_h ? fmt("%.3f h", *m.settling_h) : std::string("not settled"))};
    });

    report("AC6", "extreme imbalance", [&] {
        const auto rc = load_run_config(g_configs / "extreme_imbalance.json");
        const auto r = run_config(rc);
        const auto& z = rc.scenario.initial_soc;
        const auto hi = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
        const auto lo = static_cast<std::size_t>(std::min_element(z.begin(), z.end()) - z.begin());
        const auto& pack = rc.scenario.pack;
        const double spread = soc_spread(r.final_state);
        const bool first_ok = !r.trace.events.empty() && r.trace.events.front().from == pack.index_of(hi) &&
                              r.trace.events.front().to == pack.index_of(lo);
        const bool ok = spread < 0.02 && r.final_state.time <= 48.0 * 3600.0 && first_ok &&
                        r.final_balancer.phase == Phase::Idle;
        std::string first = r.trace.events.empty()
                                 ? std::string("none")
                                 : cell_label(r.trace.events.front().from, pack.cells_per_string) + "->" +
                                       cell_label(r.trace.events.front().to, pack.cells_per_string);
        return Outcome{ok, "final spread " + fmt("%.2f%%", spread * 100) + " at " +
                               fmt("%.2f h", r.final_state.time / 3600.0) + ", first pair " + first};
    });

    const auto table1 = load_run_config(g_configs / "table1_capacitor.json");
    const auto table2 = load_run_config(g_configs / "table2_resistor.json");
    const auto table3 = load_run_config(g_configs / "table3_switch_factor.json");
    std::optional<std::vector<SweepRow>> t2_cache;
    auto table2_rows = [&]() -> const std::vector<SweepRow>& {
        if (!t2_cache) {
            t2_cache = run_sweep(*table2.sweep);
        }
        return *t2_cache;
    };

    report("AC7", "settling strictly increases with R",
           [&] { return strictly_increasing(table2_rows(), &SweepRow::res_ohm); });

    report("AC8", "settling strictly increases with switch factor", [&] {
        return strictly_increasing(run_sweep(*table3.sweep), &SweepRow::delta);
    });

    report("AC9", "settling has an interior minimum in C", [&] {
        const auto rows = run_sweep(*table1.sweep);
        if (!all_settled(rows)) {
            return Outcome{false, hours_list(rows, &SweepRow::cap_f)};
        }
        const auto best = std::min_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
            return *a.settling_h < *b.settling_h;
        });
        const auto k = static_cast<std::size_t>(best - rows.begin());
        const bool interior = k > 0 && k + 1 < rows.size() && *rows.front().settling_h > *best->settling_h &&
                              *rows.back().settling_h > *best->settling_h;
        return Outcome{interior, hours_list(rows, &SweepRow::cap_f) + "(min at " + fmt("%g F", best->cap_f) + ")"};
    });

    report("AC10", "two-cell efficiency", [&] {
        const auto rc = load_run_config(g_configs / "efficiency_two_cell.json");
        const auto rows = run_sweep(*rc.sweep);
        bool in_range = true;
        std::map<std::pair<double, double>, std::vector<std::pair<double, double>>> slices;
        double corner = -1.0;
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& r : rows) {
            if (!r.efficiency) {
                return Outcome{false, "no transfer at C=" + fmt("%g", r.cap_f) + " R=" + fmt("%g", r.res_ohm)};
            }
            const double e = *r.efficiency;
            in_range = in_range && e > 0.0 && e < 1.0;
            lo = std::min(lo, e);
            hi = std::max(hi, e);
            slices[{r.cap_f, r.delta}].emplace_back(r.res_ohm, e);
            if (r.cap_f == 50.0 && r.res_ohm == 0.05 && r.delta == 0.5) {
                corner = e;
            }
        }
        bool monotone = true;
        for (auto& [key, pts] : slices) {
            std::sort(pts.begin(), pts.end());
            for (std::size_t k = 1; k < pts.size(); ++k) {
                monotone = monotone && pts[k].second <= pts[k - 1].second;
            }
        }
        return Outcome{in_range && monotone && corner >= 0.95,
                       "eff in [" + fmt("%.5f", lo) + ", " + fmt("%.5f", hi) + "], nonincreasing in R: " +
                           (monotone ? "yes" : "no") + ", (50 F, 50 mOhm, 0.5) = " + fmt("%.5f", corner)};
    });

    report("AC11", "voltage band does not widen", [&] {
        const auto& ref = reference_run().result;
        const auto rep = voltage_convergence_report(ref.trace);
        return Outcome{rep.final_band_mv <= rep.initial_band_mv,
                       fmt("%.3f mV", rep.initial_band_mv) + " -> " + fmt("%.3f mV", rep.final_band_mv)};
    });

    report("AC12", "determinism", [&] {
        const bool trace_same = trace_text(run_config(reference).trace) == trace_text(reference_run().result.trace);
        const auto parallel = run_sweep(*table2.sweep, 3);
        const bool sweep_same = sweep_csv(parallel) == sweep_csv(table2_rows());
        return Outcome{trace_same && sweep_same, std::string("trace rerun identical: ") + (trace_same ? "yes" : "no") +
                                                     ", sweep 1 vs 3 workers identical: " +
                                                     (sweep_same ? "yes" : "no")};
    });

    if (g_ran == 0) {
        std::fprintf(stderr, "no criterion named %s\n", g_only.c_str());
        return 1;
    }
    return g_failures == 0 ? 0 : 1;
}
