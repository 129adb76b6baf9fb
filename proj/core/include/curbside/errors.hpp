#pragma once

#include <stdexcept>
#include <string>

namespace curbside {

// Error taxonomy mirrors the CLI exit codes: validation -> 1, I/O -> 2,
// anything else (including SimulationError) -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input values: scenario invariants, parse failures, degenerate geometry.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Missing or unreadable files, short reads, bad magic numbers.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Runtime failures of the simulation itself (stuck agents, empty pools).
class SimulationError : public Error {
public:
    explicit SimulationError(const std::string& msg) : Error(msg) {}
};

} // namespace curbside
