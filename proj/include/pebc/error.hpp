#pragma once

#include <stdexcept>
#include <string>

namespace pebc {

enum class ErrorCode {
    invalid_argument,
    grid_mismatch,
    not_converged,
    near_resonance,
    divergence,
    degenerate_fit,
    config,
    io,
};

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Picard iteration for a kernel did not reach the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(ErrorCode::not_converged, what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Simulation state exceeded the blow-up guard.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double t)
        : Error(ErrorCode::divergence, what), time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

enum class ConfigErrorKind { unknown_key, malformed_value, invariant_violation, io };

class ConfigError : public Error {
public:
    ConfigError(ConfigErrorKind kind, int line, const std::string& what)
        : Error(ErrorCode::config, what), kind_(kind), line_(line) {}

    ConfigErrorKind kind() const noexcept { return kind_; }
    /// 1-based line number, 0 when the error is not tied to a line.
    int line() const noexcept { return line_; }

private:
    ConfigErrorKind kind_;
    int line_;
};

}  // namespace pebc
