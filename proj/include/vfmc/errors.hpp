#pragma once

#include <stdexcept>
#include <string>

namespace vfmc {

/// Invalid configuration or operation precondition. CLI exit code 2.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A gamma-moment integral diverges at ell -> 0 for some atom. Exit code 2.
struct DivergentMomentError : ConfigError {
    explicit DivergentMomentError(const std::string& what) : ConfigError(what) {}
};

/// Probe placed too close to the localization-window boundary. Exit code 2.
struct MarginViolationError : ConfigError {
    explicit MarginViolationError(const std::string& what) : ConfigError(what) {}
};

/// Expected work exceeds a configured hard cap. CLI exit code 3.
struct BudgetExceededError : std::runtime_error {
    explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

/// A scaling fit has too few usable grid points. CLI exit code 4.
struct FitDomainError : std::runtime_error {
    explicit FitDomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vfmc
