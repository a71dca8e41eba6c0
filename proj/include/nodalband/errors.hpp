#pragma once

#include <stdexcept>
#include <string>

namespace nodalband {

// Argument outside the domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A window, mesh or sample that cannot be built from the given parameters.
struct ConstructionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Kac-Rice evaluation at a point where the conditional law degenerates.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    ConfigError(int line, const std::string& msg)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line(line) {}
    int line;
};

} // namespace nodalband
