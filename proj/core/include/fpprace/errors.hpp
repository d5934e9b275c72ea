#pragma once

#include <stdexcept>
#include <string>

namespace fpprace {

/// Bad user-supplied configuration (invalid tau, n < 2, mismatched grids, ...).
/// The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to meet its contract (e.g. fixed point did not
/// converge within its iteration cap). Carries the residual for diagnostics.
struct solver_error : std::runtime_error {
    double residual;
    solver_error(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
};

} // namespace fpprace
