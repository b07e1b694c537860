#include "flycap/pack.hpp"

#include "flycap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace flycap {

namespace {

// Uniform [0, 1) from the top 53 bits; independent of the standard library's
// distribution implementation so seeds reproduce across toolchains.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double cell_phi(const CellParams& p, double t) {
    return p.r0 + p.r1 * (1.0 - std::exp(-p.rate1 * t)) + p.r2 * (1.0 - std::exp(-p.rate2 * t));
}

} // namespace

std::string cell_label(CellIndex c, std::size_t cells_per_string) {
    return "B" + std::to_string(c.string * cells_per_string + c.position + 1);
}

void PackConfig::validate() const {
    if (n_strings < 1 || cells_per_string < 1) {
        throw ConfigError("pack: need at least one string and one cell per string");
    }
    if (cells.size() != cell_count()) {
        std::ostringstream os;
        os << "pack: " << n_strings << "x" << cells_per_string << " grid needs " << cell_count()
           << " cells, got " << cells.size();
        throw ConfigError(os.str());
    }
    for (const auto& c : cells) {
        c.validate();
    }
}

PackConfig make_pack(std::size_t n_strings, std::size_t cells_per_string, const CellParams& base, double spread,
                     std::uint64_t seed) {
    if (!(spread >= 0.0 && spread < 1.0)) {
        throw ConfigError("pack: perturbation spread must be in [0, 1)");
    }
    PackConfig cfg;
    cfg.n_strings = n_strings;
    cfg.cells_per_string = cells_per_string;
    cfg.rng_seed = seed;
    cfg.cells.reserve(n_strings * cells_per_string);

    std::mt19937_64 rng(seed);
    auto factor = [&] { return 1.0 + spread * (2.0 * unit_uniform(rng) - 1.0); };
    for (std::size_t k = 0; k < n_strings * cells_per_string; ++k) {
        CellParams p = base;
        // Draw order is part of the seed contract.
        p.r0 *= factor();
        p.r1 *= factor();
        p.r2 *= factor();
        p.capacity_ah *= factor();
        cfg.cells.push_back(p);
    }
    cfg.validate();
    return cfg;
}

PackState make_pack_state(const PackConfig& cfg, std::span<const double> soc) {
    if (soc.size() != cfg.cell_count()) {
        throw ConfigError("initial SoC list must have one entry per cell");
    }
    PackState s;
    s.cells.reserve(soc.size());
    for (double z : soc) {
        if (!(z > 0.0 && z < 1.0)) {
            throw ConfigError("initial SoC must lie in (0, 1)");
        }
        s.cells.push_back(CellState{z, 0.0, 0.0});
    }
    s.alpha.assign(cfg.n_strings, 0.0);
    return s;
}

double string_phi(std::size_t i, const PackConfig& cfg, double t) {
    double phi = 0.0;
    for (std::size_t j = 0; j < cfg.cells_per_string; ++j) {
        phi += cell_phi(cfg.cell({i, j}), t);
    }
    return phi;
}

double string_gamma(std::size_t i, const PackState& state, const PackConfig& cfg, double t) {
    double gamma = 0.0;
    for (std::size_t j = 0; j < cfg.cells_per_string; ++j) {
        const auto& p = cfg.cell({i, j});
        const auto& s = state.cell(cfg, {i, j});
        gamma += open_circuit_voltage(s.soc, p.ocv) - s.vc1 * std::exp(-p.rate1 * t) - s.vc2 * std::exp(-p.rate2 * t);
    }
    return gamma;
}

CurrentSplit solve_current_split(std::span<const double> phis, std::span<const double> gammas,
                                 double total_current) {
    const std::size_t n = phis.size();
    if (n == 0 || gammas.size() != n) {
        throw ConfigError("solve_current_split: phi and gamma must be nonempty and the same length");
    }
    if (n == 1) {
        return {{total_current}};
    }

    // Row-major augmented matrix [A | b].
    const std::size_t w = n + 1;
    std::vector<double> a(n * w, 0.0);
    for (std::size_t r = 0; r + 1 < n; ++r) {
        a[r * w + r] = phis[r];
        a[r * w + r + 1] = -phis[r + 1];
        a[r * w + n] = gammas[r] - gammas[r + 1];
    }
    for (std::size_t c = 0; c < n; ++c) {
        a[(n - 1) * w + c] = 1.0;
    }
    a[(n - 1) * w + n] = total_current;

    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            scale = std::max(scale, std::abs(a[r * w + c]));
        }
    }

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a[r * w + k]) > std::abs(a[pivot * w + k])) {
                pivot = r;
            }
        }
        if (!(std::abs(a[pivot * w + k]) > 1e-14 * scale)) {
            throw SingularSystemError("current split: string resistance matrix is singular");
        }
        if (pivot != k) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(k * w),
                             a.begin() + static_cast<std::ptrdiff_t>((k + 1) * w),
                             a.begin() + static_cast<std::ptrdiff_t>(pivot * w));
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a[r * w + k] / a[k * w + k];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = k; c < w; ++c) {
                a[r * w + c] -= f * a[k * w + c];
            }
        }
    }

    CurrentSplit out;
    out.alpha.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double acc = a[k * w + n];
        for (std::size_t c = k + 1; c < n; ++c) {
            acc -= a[k * w + c] * out.alpha[c];
        }
        out.alpha[k] = acc / a[k * w + k];
    }
    return out;
}

PackState step_pack(const PackState& state, const PackConfig& cfg, double total_current, double dt,
                    std::span<const Injection> injections) {
    if (!(dt > 0.0)) {
        throw ConfigError("step_pack: dt must be > 0");
    }
    const std::size_t n = cfg.n_strings;
    std::vector<double> extra(cfg.cell_count(), 0.0);
    for (const auto& inj : injections) {
        if (inj.cell.string >= n || inj.cell.position >= cfg.cells_per_string) {
            throw ConfigError("step_pack: injection targets a cell outside the pack");
        }
        extra[cfg.flat(inj.cell)] += inj.current;
    }

    std::vector<double> phis(n);
    std::vector<double> gammas(n);
    for (std::size_t i = 0; i < n; ++i) {
        phis[i] = string_phi(i, cfg, dt);
        gammas[i] = string_gamma(i, state, cfg, dt);
        // An injected current drops the connected cell's voltage like its own
        // string current would.
        for (std::size_t j = 0; j < cfg.cells_per_string; ++j) {
            const double x = extra[cfg.flat({i, j})];
            if (x != 0.0) {
                gammas[i] -= x * cell_phi(cfg.cell({i, j}), dt);
            }
        }
    }

    PackState next;
    next.alpha = solve_current_split(phis, gammas, total_current).alpha;
    next.cells.resize(state.cells.size());
    for (std::size_t k = 0; k < state.cells.size(); ++k) {
        const auto& p = cfg.cells[k];
        const auto& s = state.cells[k];
        const double ib = next.alpha[k / cfg.cells_per_string] + extra[k];
        auto& out = next.cells[k];
        out.soc = soc_step(s.soc, ib, dt, p.capacity_ah);
        out.vc1 = rc_branch_step(s.vc1, ib, dt, p.r1, p.rate1);
        out.vc2 = rc_branch_step(s.vc2, ib, dt, p.r2, p.rate2);
    }
    next.time = state.time + dt;
    return next;
}

} // namespace flycap
