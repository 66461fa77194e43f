#pragma once

#include <stdexcept>
#include <string>

namespace mbs {

// Invalid physical input (out-of-range angle, negative saturation, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation hit an ill-conditioned point (field null, 0/0 overlap).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative scheme failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Nonlinear fringe fit did not converge after bounded restarts.
struct FitError : std::runtime_error {
  explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario configuration is malformed (parse failure, unknown key, invalid
// value); maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mbs
