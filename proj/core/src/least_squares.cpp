#include "kerrtwpa/least_squares.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kerrtwpa/errors.hpp"

namespace kerrtwpa {

namespace {

constexpr double kLambdaInitial = 1e-3;
constexpr double kLambdaMax = 1e16;

std::string describe(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << "]";
  return os.str();
}

std::optional<Eigen::VectorXd> evaluate(const ResidualFn& f, const Eigen::VectorXd& p,
                                        int* evaluations) {
  if (evaluations) ++*evaluations;
  auto r = f(p);
  if (r && !r->allFinite()) {
    throw SolverError("fit aborted: non-finite residual at parameters " + describe(p),
                      std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

Eigen::VectorXd project(const Eigen::VectorXd& p, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return p.cwiseMax(lo).cwiseMin(hi);
}

Eigen::MatrixXd pseudo_inverse_psd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& w = eig.eigenvalues();
  const double cut = std::max(w.cwiseAbs().maxCoeff(), 1e-300) * 1e-14;
  Eigen::VectorXd inv(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) inv[i] = w[i] > cut ? 1.0 / w[i] : 0.0;
  Eigen::MatrixXd out = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

void CurveFitProblem::validate() const {
  if (!residual) throw ConfigError("fit problem has no residual evaluator");
  const auto n = initial.size();
  if (n == 0) throw ConfigError("fit problem has no parameters");
  if (lower.size() != n || upper.size() != n) throw ConfigError("fit bounds size mismatch");
  if (typical.size() != 0 && typical.size() != n) {
    throw ConfigError("fit typical-scale size mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw ConfigError("fit bounds unordered for parameter " + std::to_string(i));
    }
    if (!(initial[i] >= lower[i] && initial[i] <= upper[i])) {
      throw ConfigError("fit initial parameter " + std::to_string(i) + " lies outside its bounds");
    }
  }
  if (max_iterations < 1) throw ConfigError("fit iteration cap must be positive");
}

Eigen::VectorXd FitResult::standard_errors() const {
  return covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& r0, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, const Eigen::VectorXd& scale,
                                 int* evaluations) {
  const double h_rel = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd jac(r0.size(), p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = h_rel * scale[j];
    Eigen::VectorXd plus = p, minus = p;
    plus[j] += h;
    minus[j] -= h;
    std::optional<Eigen::VectorXd> rp, rm;
    if (plus[j] <= upper[j]) rp = evaluate(residual, plus, evaluations);
    if (minus[j] >= lower[j]) rm = evaluate(residual, minus, evaluations);
    if (rp && rm) {
      jac.col(j) = (*rp - *rm) / (2.0 * h);
    } else if (rp) {
      jac.col(j) = (*rp - r0) / h;
    } else if (rm) {
      jac.col(j) = (r0 - *rm) / h;
    } else {
      throw SolverError("cannot difference parameter " + std::to_string(j) + " at " + describe(p),
                        r0.norm());
    }
  }
  return jac;
}

FitResult least_squares(const CurveFitProblem& problem) {
  problem.validate();
  const Eigen::Index n = problem.initial.size();
  FitResult result;
  Eigen::VectorXd p = problem.initial;
  auto r0 = evaluate(problem.residual, p, &result.evaluations);
  if (!r0) {
    throw SolverError("fit initial point is outside the model domain: " + describe(p), 0.0);
  }
  Eigen::VectorXd r = *r0;
  double cost = 0.5 * r.squaredNorm();
  result.cost_history.push_back(cost);

  auto scale_of = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      s[i] = problem.typical.size() ? problem.typical[i] : std::max(std::abs(x[i]), 1.0);
    }
    return s;
  };

  double lambda = kLambdaInitial;
  Eigen::MatrixXd jac =
      numeric_jacobian(problem.residual, p, r, problem.lower, problem.upper, scale_of(p),
                       &result.evaluations);
  result.reason = "iteration cap reached";
  bool done = false;
  while (!done && result.iterations < problem.max_iterations) {
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.cwiseProduct(scale_of(p)).lpNorm<Eigen::Infinity>() <=
        problem.gradient_tolerance * std::max(cost, 1e-300)) {
      result.converged = true;
      result.reason = "gradient tolerance";
      break;
    }
    if (cost == 0.0) {
      result.converged = true;
      result.reason = "zero residual";
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd diag = jtj.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(diag[i] > 0.0)) diag[i] = 1.0;
    }

    bool accepted = false;
    while (!accepted) {
      if (lambda > kLambdaMax) {
        done = true;
        result.converged = result.iterations > 0;
        result.reason = "damping exhausted";
        break;
      }
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd trial = project(p + step, problem.lower, problem.upper);
      const Eigen::VectorXd actual_step = trial - p;
      auto rt = evaluate(problem.residual, trial, &result.evaluations);
      const double trial_cost = rt ? 0.5 * rt->squaredNorm() : std::numeric_limits<double>::infinity();
      if (!(trial_cost < cost) && !(trial_cost == cost && actual_step.isZero())) {
        lambda *= 10.0;
        continue;
      }
      accepted = true;
      lambda = std::max(lambda / 10.0, 1e-300);
      ++result.iterations;
      const double prev_cost = cost;
      p = trial;
      r = *rt;
      cost = trial_cost;
      result.cost_history.push_back(cost);

      const double step_norm = actual_step.cwiseQuotient(scale_of(p)).norm();
      if (step_norm <= problem.step_tolerance) {
        result.converged = true;
        result.reason = "step tolerance";
        done = true;
      } else if (prev_cost - cost <= problem.cost_tolerance * prev_cost) {
        result.converged = true;
        result.reason = "cost tolerance";
        done = true;
      }
      jac = numeric_jacobian(problem.residual, p, r, problem.lower, problem.upper, scale_of(p),
                             &result.evaluations);
    }
  }

  result.parameters = p;
  result.residuals = r;
  result.cost = cost;
  result.residual_norm = r.norm();
  const auto m = r.size();
  const double dof = m > n ? static_cast<double>(m - n) : 0.0;
  const double s2 = dof > 0.0 ? r.squaredNorm() / dof : 0.0;
  result.covariance = s2 * pseudo_inverse_psd(jac.transpose() * jac);
  return result;
}

}  // namespace kerrtwpa
