#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kerrtwpa {

/// Returns the residual vector, or nullopt when the trial parameters lie in
/// a region where the model is undefined (the step is then rejected).
using ResidualFn = std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)>;

struct CurveFitProblem {
  ResidualFn residual;
  Eigen::VectorXd initial;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double gradient_tolerance = 1e-12;
  double step_tolerance = 1e-12;   // relative
  double cost_tolerance = 1e-15;   // relative
  int max_iterations = 200;
  /// Typical magnitude per parameter for finite-difference steps; empty
  /// uses max(|p|, 1).
  Eigen::VectorXd typical;

  /// ConfigError when sizes mismatch, bounds are unordered or the initial
  /// point lies outside them.
  void validate() const;
};

struct FitResult {
  Eigen::VectorXd parameters;
  Eigen::VectorXd residuals;
  double cost = 0.0;  // half the squared residual norm
  double residual_norm = 0.0;
  Eigen::MatrixXd covariance;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string reason;
  /// Cost after each accepted step, starting with the initial cost.
  std::vector<double> cost_history;

  [[nodiscard]] Eigen::VectorXd standard_errors() const;
};

/// Central-difference Jacobian with step h_j = eps^(1/3) * scale_j, falling
/// back to one-sided differences at a bound or an undefined neighbour.
Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& r0, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, const Eigen::VectorXd& scale,
                                 int* evaluations = nullptr);

/// Levenberg-Marquardt with Marquardt diagonal scaling. The damping starts
/// at 1e-3, is multiplied by 10 on a rejected step and divided by 10 on an
/// accepted one. Trial points are projected onto the bounds. The covariance
/// is s^2 (J^T J)^+ with s^2 = |r|^2/(m - n). Throws SolverError carrying the
/// offending parameters if a residual is non-finite.
FitResult least_squares(const CurveFitProblem& problem);

}  // namespace kerrtwpa
