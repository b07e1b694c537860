#include "flycap/cell.hpp"

#include "flycap/errors.hpp"

#include <cmath>
#include <initializer_list>
#include <sstream>

namespace flycap {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

} // namespace

void OcvParams::validate() const {
    if (!finite_all({v0, low_amp, low_rate, slope, high_amp, high_rate})) {
        throw ConfigError("ocv: parameters must be finite");
    }
    if (low_rate <= 0.0 || high_rate <= 0.0) {
        throw ConfigError("ocv: low_rate and high_rate must be > 0");
    }
    // Each term is nondecreasing in z when its amplitude is >= 0, so the sum
    // is strictly increasing as soon as one amplitude is positive.
    if (low_amp < 0.0 || slope < 0.0 || high_amp < 0.0) {
        throw ConfigError("ocv: low_amp, slope and high_amp must be >= 0 (monotone curve)");
    }
    if (low_amp == 0.0 && slope == 0.0 && high_amp == 0.0) {
        throw ConfigError("ocv: curve is flat; at least one of low_amp, slope, high_amp must be > 0");
    }
}

void CellParams::validate() const {
    if (!finite_all({r0, r1, rate1, r2, rate2, capacity_ah})) {
        throw ConfigError("cell: parameters must be finite");
    }
    if (r0 < 0.0 || r1 < 0.0 || r2 < 0.0) {
        throw ConfigError("cell: resistances must be >= 0");
    }
    if (rate1 <= 0.0 || rate2 <= 0.0) {
        throw ConfigError("cell: rate1 and rate2 must be > 0");
    }
    if (capacity_ah <= 0.0) {
        throw ConfigError("cell: capacity_ah must be > 0");
    }
    ocv.validate();
}

CellParams reference_cell() { return CellParams{}; }

double open_circuit_voltage(double z, const OcvParams& p) {
    if (!(z > 0.0 && z < 1.0)) {
        std::ostringstream os;
        os << "open_circuit_voltage: SoC " << z << " outside (0, 1)";
        throw DomainError(os.str());
    }
    return p.v0 + p.low_amp * (1.0 - std::exp(-p.low_rate * z)) + p.slope * z +
           p.high_amp * (1.0 - std::exp(-p.high_rate / (1.0 - z)));
}

double open_circuit_voltage_slope(double z, const OcvParams& p) {
    if (!(z > 0.0 && z < 1.0)) {
        throw DomainError("open_circuit_voltage_slope: SoC outside (0, 1)");
    }
    const double u = 1.0 - z;
    return p.low_amp * p.low_rate * std::exp(-p.low_rate * z) + p.slope +
           p.high_amp * p.high_rate / (u * u) * std::exp(-p.high_rate / u);
}

double soc_step(double z, double current, double dt, double capacity_ah, double tolerance) {
    const double next = z - current * dt / (3600.0 * capacity_ah);
    if (next < -tolerance || next > 1.0 + tolerance || !std::isfinite(next)) {
        std::ostringstream os;
        os << "state of charge left [0, 1]: " << z << " -> " << next << " at " << current << " A";
        throw SimulationFault(os.str());
    }
    if (next < 0.0) {
        return 0.0;
    }
    if (next > 1.0) {
        return 1.0;
    }
    return next;
}

double rc_branch_step(double vc, double current, double dt, double r, double rate) {
    const double decay = std::exp(-rate * dt);
    return vc * decay + r * current * (1.0 - decay);
}

double terminal_voltage(const CellState& s, const CellParams& p, double current) {
    return open_circuit_voltage(s.soc, p.ocv) - current * p.r0 - s.vc1 - s.vc2;
}

} // namespace flycap
