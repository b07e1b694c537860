import math
from pathlib import Path

import pytest

import flycap

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_reference_ocv():
    assert flycap.open_circuit_voltage(0.6) == pytest.approx(3.303004869047748, rel=1e-14)
    with pytest.raises(flycap.SimulationFault):
        flycap.open_circuit_voltage(1.0)


def test_capacitor_closed_form():
    assert flycap.capacitor_current(3.3, 3.2, 0.05, 50.0, 0.0) == pytest.approx(2.0)
    assert flycap.capacitor_current(3.3, 3.2, 0.05, 50.0, 2.5) == pytest.approx(2.0 * math.exp(-1.0))
    assert flycap.capacitor_voltage_update(3.2, 3.3, 0.05, 50.0, 1.25) == pytest.approx(3.3 - 0.1 * math.exp(-0.5))


def test_current_split():
    alpha = flycap.solve_current_split([0.2, 0.3], [13.20, 13.21], 0.0)
    assert alpha == pytest.approx([-0.02, 0.02])
    assert sum(flycap.solve_current_split([0.2, 0.25, 0.3], [13.2, 13.21, 13.19], 12.0)) == pytest.approx(12.0)


def test_simulate_and_report(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        '{"pack": {"strings": 2, "cells_per_string": 2},'
        ' "initial_soc": {"mean": 0.6, "spread": 0.03},'
        ' "profile": {"type": "rest", "hours": 0.1},'
        ' "balancer": {"v_cap_init_V": 3.3}}'
    )
    out = flycap.simulate(cfg, seed=3)
    trace = out["trace"]
    assert trace["n_strings"] == 2
    assert len(trace["soc"]) == 4 * len(trace["time_s"])
    assert out["max_kcl_residual"] < 1e-9
    assert out["metrics"]["switch_events"] == len(trace["events"]) > 0
    assert out["metrics"]["efficiency"] < 1.0
    again = flycap.simulate(cfg, seed=3)
    assert again["trace"]["soc"] == trace["soc"]


def test_sweep_rows(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(
        '{"pack": {"strings": 1, "cells_per_string": 2, "perturbation": 0},'
        ' "initial_soc": {"values": [0.6, 0.695]}, "profile": {"type": "rest", "hours": 0.05},'
        ' "sweep": {"kind": "efficiency", "cap_F": [50], "res_ohm": [0.05, 0.1], "switch_factor": [0.5],'
        ' "window_hours": 0.05}}'
    )
    rows = flycap.sweep(cfg, workers=2)
    assert [r["res_ohm"] for r in rows] == [0.05, 0.1]
    assert 0.95 < rows[0]["efficiency"] < 1.0
    assert rows[1]["efficiency"] <= rows[0]["efficiency"]


def test_config_errors(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"profile": {"type": "rest"}, "bogus": 1}')
    with pytest.raises(flycap.ConfigError, match="bogus"):
        flycap.simulate(cfg)
    with pytest.raises(flycap.ConfigError):
        flycap.sweep(CONFIGS / "reference_3p4s.json")
