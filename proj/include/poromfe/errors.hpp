#pragma once

#include <stdexcept>
#include <string>

namespace poromfe {

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear solve failed; carries the relative residual reached.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A time step could not be completed (Newton stalled or the linear solve broke down).
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace poromfe
