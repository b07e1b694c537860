"""Flying-capacitor balancing simulator for parallel/series Li-ion packs."""

from ._flycap import (
    ConfigError,
    SimulationFault,
    capacitor_current,
    capacitor_voltage_update,
    open_circuit_voltage,
    report,
    simulate,
    solve_current_split,
    sweep,
)

__all__ = [
    "ConfigError",
    "SimulationFault",
    "capacitor_current",
    "capacitor_voltage_update",
    "open_circuit_voltage",
    "report",
    "simulate",
    "solve_current_split",
    "sweep",
]
