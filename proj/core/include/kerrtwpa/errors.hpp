#pragma once

#include <stdexcept>
#include <string>

namespace kerrtwpa {

/// Failure categories. Values double as CLI exit codes.
enum class ErrorKind : int {
  config = 2,
  data = 3,
  solver = 4,
  model_validity = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Iterative solver did not converge; carries the last residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual)
      : Error(ErrorKind::solver, what), last_residual_(last_residual) {}
  [[nodiscard]] double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Input lies outside the regime where a model is valid (above cutoff,
/// unphysical branch, first-order ripple model breakdown, ...).
class ModelValidityError : public Error {
 public:
  explicit ModelValidityError(const std::string& what)
      : Error(ErrorKind::model_validity, what) {}
};

}  // namespace kerrtwpa
