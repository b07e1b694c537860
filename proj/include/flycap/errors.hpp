#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flycap {

/// Invalid user input: parameters, configuration, command-line values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when one applies.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : ConfigError(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The model left its valid region while running (SoC out of range, singular split, ...).
class SimulationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public SimulationFault {
public:
    using SimulationFault::SimulationFault;
};

class SingularSystemError : public SimulationFault {
public:
    using SimulationFault::SimulationFault;
};

} // namespace flycap
