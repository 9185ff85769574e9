#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace nodal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input: ranges, grid sizes, unknown names.
struct ConfigurationError : Error {
  using Error::Error;
};

// Non-integrable weight exponent.
struct SingularityError : Error {
  using Error::Error;
};

// A function that must be positive in the interior is not.
struct PositivityError : Error {
  using Error::Error;
};

// Pure Neumann problem whose data do not integrate to zero.
struct CompatibilityError : Error {
  using Error::Error;
};

// Violated precondition on a numerical argument.
struct PreconditionError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, Eigen::VectorXd last, double res)
      : Error(what), last_iterate(std::move(last)), residual(res) {}
  Eigen::VectorXd last_iterate;
  double residual;
};

// Parameter ladder exhausted.
struct SelectionError : Error {
  SelectionError(const std::string& what, std::string failing)
      : Error(what), last_failure(std::move(failing)) {}
  std::string last_failure;
};

}  // namespace nodal
