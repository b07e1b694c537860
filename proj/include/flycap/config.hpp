#pragma once

// JSON run configuration. See configs/README.md for the schema.

#include "flycap/simulation.hpp"
#include "flycap/sweep.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace flycap {

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<std::filesystem::path> output_dir;
};

struct RunConfig {
    Scenario scenario;
    SimOptions sim;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    std::optional<SweepSpec> sweep;
    /// Set when the sweep block asks for the two-cell efficiency study.
    std::optional<EfficiencyStudySpec> efficiency_study;
};

/// Initial SoCs: `mean` plus offsets drawn uniformly and rescaled so that
/// max - min equals `spread` exactly (all cells at `mean` when spread == 0).
[[nodiscard]] std::vector<double> spread_initial_soc(std::size_t cells, double mean, double spread,
                                                     std::uint64_t seed);

/// Relative file paths inside the config resolve against `base_dir`.
[[nodiscard]] RunConfig parse_run_config(std::string_view json_text, const ConfigOverrides& overrides = {},
                                         const std::filesystem::path& base_dir = ".");
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

} // namespace flycap
