#pragma once

#include <stdexcept>
#include <string>

namespace ndnfwd {

// Caller passed arguments that violate a documented precondition.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Input text (topology file, scenario config) failed to parse or validate.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error(format(line, what)), line_(line) {}

    int line() const { return line_; }

private:
    static std::string format(int line, const std::string& what) {
        return "line " + std::to_string(line) + ": " + what;
    }
    int line_ = 0;
};

// An iterative method hit its iteration cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

// A run failed after configuration was accepted (event cap, accounting breach).
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ndnfwd
