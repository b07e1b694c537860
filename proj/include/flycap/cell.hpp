#pragma once

// Single-cell equivalent circuit: OCV source, series resistance and two
// parallel RC branches. Positive current discharges the cell.

namespace flycap {

/// Open-circuit voltage curve coefficients:
///   OCV(z) = v0 + low_amp*(1 - exp(-low_rate*z)) + slope*z
///               + high_amp*(1 - exp(-high_rate/(1 - z)))
/// The low_* term shapes the knee near empty, high_* the rise near full.
struct OcvParams {
    double v0 = 2.9;
    double low_amp = 0.2;
    double low_rate = 10.0;
    double slope = 0.3;
    double high_amp = 0.2;
    double high_rate = 0.05;

    /// Throws ConfigError unless both rates are positive and the curve is
    /// strictly increasing (all amplitudes non-negative, at least one positive).
    void validate() const;
};

struct CellParams {
    double r0 = 0.050;        ///< series resistance, ohm
    double r1 = 0.020;        ///< fast branch resistance, ohm
    double rate1 = 0.1;       ///< fast branch 1/(R1*C1), 1/s
    double r2 = 0.010;        ///< slow branch resistance, ohm
    double rate2 = 0.01;      ///< slow branch 1/(R2*C2), 1/s
    double capacity_ah = 10.0;
    OcvParams ocv;

    void validate() const;
};

struct CellState {
    double soc = 0.6;
    double vc1 = 0.0; ///< fast branch voltage, V
    double vc2 = 0.0; ///< slow branch voltage, V

    friend bool operator==(const CellState&, const CellState&) = default;
};

/// The default cell: 10 Ah, OCV(0.6) ~ 3.30 V.
[[nodiscard]] CellParams reference_cell();

/// Throws DomainError unless 0 < z < 1.
[[nodiscard]] double open_circuit_voltage(double z, const OcvParams& p);

/// Analytic dOCV/dz.
[[nodiscard]] double open_circuit_voltage_slope(double z, const OcvParams& p);

inline constexpr double kSocTolerance = 1e-6;

/// Coulomb counting over one step. Results within `tolerance` outside [0, 1]
/// are saturated; anything further is a SimulationFault.
[[nodiscard]] double soc_step(double z, double current, double dt, double capacity_ah,
                              double tolerance = kSocTolerance);

/// Exact update of one RC branch under constant current over `dt`.
[[nodiscard]] double rc_branch_step(double vc, double current, double dt, double r, double rate);

[[nodiscard]] double terminal_voltage(const CellState& s, const CellParams& p, double current);

} // namespace flycap
