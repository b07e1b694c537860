#include "flycap/config.hpp"
#include "flycap/errors.hpp"
#include "flycap/metrics.hpp"

#include <doctest.h>

#include <string>

using namespace flycap;

namespace {

const std::string kBase = R"({
  // comments are allowed
  "seed": 3,
  "pack": {"strings": 2, "cells_per_string": 2, "perturbation": 0.0},
  "initial_soc": {"mean": 0.6, "spread": 0.04},
  "profile": {"type": "rest", "hours": 1},
  "balancer": {"cap_F": 50, "res_ohm": 0.05, "switch_factor": 0.5}
})";

std::string with(const std::string& key, const std::string& value) {
    auto text = kBase;
    text.insert(text.rfind('}'), ",\n  \"" + key + "\": " + value + "\n");
    return text;
}

std::size_t error_line(const std::string& text) {
    try {
        (void)parse_run_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("spread_initial_soc hits the spread exactly") {
    const auto z = spread_initial_soc(12, 0.6, 0.04, 5);
    CHECK(soc_spread(z) == doctest::Approx(0.04).epsilon(1e-12));
    double lo = 1.0;
    double hi = 0.0;
    for (double x : z) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(spread_initial_soc(12, 0.6, 0.04, 5) == z);
    CHECK(spread_initial_soc(12, 0.6, 0.04, 6) != z);
    CHECK(spread_initial_soc(3, 0.6, 0.0, 5) == std::vector<double>(3, 0.6));
    CHECK_THROWS_AS((void)spread_initial_soc(3, 0.99, 0.1, 5), ConfigError);
}

TEST_CASE("parse_run_config: basic scenario") {
    const auto rc = parse_run_config(kBase);
    CHECK(rc.seed == 3);
    CHECK(rc.scenario.pack.n_strings == 2);
    CHECK(rc.scenario.pack.cell_count() == 4);
    CHECK(rc.scenario.initial_soc == spread_initial_soc(4, 0.6, 0.04, 4));
    CHECK(rc.scenario.profile.duration() == 3600.0);
    CHECK(rc.scenario.balancing);
    CHECK(rc.sim.dt == 0.1);
    CHECK_FALSE(rc.sweep.has_value());
}

TEST_CASE("parse_run_config: overrides") {
    ConfigOverrides o;
    o.seed = 9;
    o.dt = 0.05;
    o.output_dir = "elsewhere";
    const auto rc = parse_run_config(kBase, o);
    CHECK(rc.seed == 9);
    CHECK(rc.sim.dt == 0.05);
    CHECK(rc.output_dir == "elsewhere");
    CHECK(rc.scenario.initial_soc == spread_initial_soc(4, 0.6, 0.04, 10));
}

TEST_CASE("parse_run_config: rejects bad input") {
    CHECK_THROWS_AS((void)parse_run_config(with("bogus", "1")), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config(R"({"pack": {"strings": 1}})"), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config(with("simulation", R"({"dt_s": 2.0})")), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config(with("simulation", R"({"dt_s": "fast"})")), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config(with("sweep", R"({"cap_F": [], "res_ohm": [0.05], "switch_factor": [0.5]})")),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_run_config(with("sweep", R"({"kind": "other"})")), ConfigError);
}

TEST_CASE("parse_run_config: dt above the switch period names the constraint") {
    try {
        (void)parse_run_config(with("simulation", R"({"dt_s": 2.0})"));
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("switch_factor*R*C") != std::string::npos);
    }
}

TEST_CASE("parse_run_config: JSON errors report the line") {
    CHECK(error_line("{\n  \"seed\": 1,\n  \"pack\": {,}\n}") == 3);
    CHECK(error_line("{\n\n\n  \"seed\": 1\n") == 5);
}

TEST_CASE("parse_run_config: sweep blocks") {
    const auto rc = parse_run_config(
        with("sweep", R"({"cap_F": [20, 50], "res_ohm": [0.05], "switch_factor": [0.5, 1], "max_sim_hours": 10})"));
    REQUIRE(rc.sweep.has_value());
    CHECK(rc.sweep->size() == 4);
    CHECK(rc.sweep->max_sim_hours == 10.0);
    CHECK(rc.sweep->threshold == 0.02);
    CHECK_FALSE(rc.efficiency_study.has_value());

    const auto eff = parse_run_config(
        with("sweep", R"({"kind": "efficiency", "cap_F": [50], "res_ohm": [0.05, 0.1], "switch_factor": [0.5]})"));
    REQUIRE(eff.efficiency_study.has_value());
    CHECK(eff.efficiency_study->soc_b == 0.695);
    CHECK(eff.sweep->scenario.pack.cell_count() == 2);
    CHECK(eff.sweep->size() == 2);
}

TEST_CASE("parse_run_config: explicit SoC values") {
    const std::string text = R"({
      "pack": {"strings": 2, "cells_per_string": 2},
      "initial_soc": {"values": [0.6, 0.62, 0.58, 0.6]},
      "profile": {"type": "rest"}
    })";
    CHECK(parse_run_config(text).scenario.initial_soc == std::vector<double>{0.6, 0.62, 0.58, 0.6});
    auto three = text;
    three.replace(three.find(", 0.6]"), 5, "");
    CHECK_THROWS_AS((void)parse_run_config(three), ConfigError);
}
