#pragma once

// n parallel strings of m series cells, and the per-step current split that
// keeps the string voltages equal.

#include "flycap/cell.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flycap {

struct CellIndex {
    std::size_t string = 0;
    std::size_t position = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// "B<k>" with k counted 1-based, string-major.
[[nodiscard]] std::string cell_label(CellIndex c, std::size_t cells_per_string);

struct PackConfig {
    std::size_t n_strings = 1;
    std::size_t cells_per_string = 1;
    std::vector<CellParams> cells; ///< string-major, n_strings * cells_per_string
    std::uint64_t rng_seed = 0;

    [[nodiscard]] std::size_t cell_count() const noexcept { return n_strings * cells_per_string; }
    [[nodiscard]] std::size_t flat(CellIndex c) const noexcept { return c.string * cells_per_string + c.position; }
    [[nodiscard]] CellIndex index_of(std::size_t flat_index) const noexcept {
        return {flat_index / cells_per_string, flat_index % cells_per_string};
    }
    [[nodiscard]] const CellParams& cell(CellIndex c) const { return cells.at(flat(c)); }

    void validate() const;
};

/// Builds an n x m pack from `base`, scaling r0, r1, r2 and capacity of each
/// cell by an independent factor drawn uniformly from [1 - spread, 1 + spread].
[[nodiscard]] PackConfig make_pack(std::size_t n_strings, std::size_t cells_per_string,
                                   const CellParams& base, double spread, std::uint64_t seed);

struct PackState {
    std::vector<CellState> cells; ///< same layout as PackConfig::cells
    std::vector<double> alpha;    ///< string currents from the most recent step
    double time = 0.0;

    [[nodiscard]] const CellState& cell(const PackConfig& cfg, CellIndex c) const { return cells.at(cfg.flat(c)); }
};

/// Relaxed pack (RC branches at zero, no string current) at the given SoCs.
[[nodiscard]] PackState make_pack_state(const PackConfig& cfg, std::span<const double> soc);

struct CurrentSplit {
    std::vector<double> alpha;
};

/// External current drawn from one cell on top of its string current
/// (balancer connection). Positive discharges the cell.
struct Injection {
    CellIndex cell;
    double current = 0.0;
};

/// Effective series resistance of string i after holding a constant current
/// for `t` seconds: sum over cells of r0 + r1(1 - e^{-rate1 t}) + r2(1 - e^{-rate2 t}).
[[nodiscard]] double string_phi(std::size_t i, const PackConfig& cfg, double t);

/// Source voltage of string i looking `t` seconds ahead with no current:
/// sum over cells of OCV(z) - vc1 e^{-rate1 t} - vc2 e^{-rate2 t}.
/// At t = 0 this is the sum of the cells' terminal voltages at zero current.
[[nodiscard]] double string_gamma(std::size_t i, const PackState& state, const PackConfig& cfg, double t = 0.0);

/// String currents that give every string the same terminal voltage
/// gamma_i - phi_i a_i while summing to the pack current:
///   phi_i a_i - phi_{i+1} a_{i+1} = gamma_i - gamma_{i+1}   (i = 1..n-1)
///   sum a_i = total_current
/// Positive a_i discharges string i, so the higher-voltage string of an idle
/// pack discharges into the others. Gaussian elimination with partial pivoting.
[[nodiscard]] CurrentSplit solve_current_split(std::span<const double> phis, std::span<const double> gammas,
                                               double total_current);

/// Advances every cell by dt under `total_current`. Each injection adds its
/// current to one cell; its voltage effect on the string enters the split.
[[nodiscard]] PackState step_pack(const PackState& state, const PackConfig& cfg, double total_current, double dt,
                                  std::span<const Injection> injections = {});

} // namespace flycap
