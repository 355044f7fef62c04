#include "kerrtwpa/calibration_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"
#include "kerrtwpa/snail_cell.hpp"
#include "kerrtwpa/trig.hpp"

namespace kerrtwpa {

namespace {

constexpr double kPico = 1e-12;
constexpr double kMicro = 1e-6;
constexpr double kMaxAsymmetry = 0.3;

}  // namespace

std::vector<double> unwrap_phase(const std::vector<double>& phase) {
  std::vector<double> out(phase.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (i > 0) {
      const double jump = phase[i] - phase[i - 1];
      if (std::abs(jump) > constants::pi) {
        offset -= constants::two_pi * std::round(jump / constants::two_pi);
      }
    }
    out[i] = phase[i] + offset;
  }
  return out;
}

DispersionFit fit_dispersion_phase(const std::vector<PhaseSample>& data,
                                   const DispersionFixed& fixed) {
  if (data.size() < 3) throw DataError("phase fit needs at least 3 samples");
  if (fixed.n_cells == 0 || !(fixed.c_g > 0.0) || !(fixed.c_j > 0.0)) {
    throw ConfigError("phase fit needs positive n_cells, c_g and c_j");
  }
  auto sorted = data;
  std::sort(sorted.begin(), sorted.end(),
            [](const PhaseSample& a, const PhaseSample& b) { return a.omega < b.omega; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i].omega > 0.0) || !std::isfinite(sorted[i].theta)) {
      throw DataError("phase sample " + std::to_string(i) + " needs a positive frequency and finite phase");
    }
    if (i > 0 && sorted[i].omega == sorted[i - 1].omega) {
      throw DataError("duplicate phase sample at " +
                      std::to_string(units::rad_per_s_to_ghz(sorted[i].omega)) + " GHz");
    }
  }
  std::vector<double> raw(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) raw[i] = sorted[i].theta;
  const auto theta = unwrap_phase(raw);
  const double n = static_cast<double>(fixed.n_cells);
  const double omega_max = sorted.back().omega;

  // Low-frequency slope N sqrt(L Cg) seeds L; theta0 absorbs the remainder.
  const double slope = (theta[1] - theta[0]) / (sorted[1].omega - sorted[0].omega);
  double l_guess = slope > 0.0 ? (slope / n) * (slope / n) / fixed.c_g : 500e-12;
  const double l_cap = 1.0 / (omega_max * omega_max * fixed.c_j);
  l_guess = std::min(l_guess, 0.9 * l_cap);

  auto model = [&](double l, double omega) {
    const double x = 1.0 - omega * omega * l * fixed.c_j;
    return n * omega * std::sqrt(l * fixed.c_g) / std::sqrt(x);
  };
  const double theta0_guess = theta[0] - model(l_guess, sorted[0].omega);

  CurveFitProblem problem;
  problem.initial = Eigen::Vector2d(l_guess / kPico, theta0_guess);
  problem.lower = Eigen::Vector2d(1e-3 * l_guess / kPico, -1e6);
  problem.upper = Eigen::Vector2d(l_cap / kPico, 1e6);
  problem.typical = Eigen::Vector2d(l_guess / kPico, constants::pi);
  problem.residual = [&](const Eigen::VectorXd& p) -> std::optional<Eigen::VectorXd> {
    const double l = p[0] * kPico;
    if (!(omega_max * omega_max * l * fixed.c_j < 1.0)) return std::nullopt;
    Eigen::VectorXd res(static_cast<Eigen::Index>(sorted.size()));
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      res[static_cast<Eigen::Index>(i)] = p[1] + model(l, sorted[i].omega) - theta[i];
    }
    return res;
  };

  DispersionFit fit;
  fit.engine = least_squares(problem);
  const auto se = fit.engine.standard_errors();
  fit.l_cell = fit.engine.parameters[0] * kPico;
  fit.theta0 = fit.engine.parameters[1];
  fit.l_cell_se = se[0] * kPico;
  fit.theta0_se = se[1];
  return fit;
}

double cell_inductance(double i0, double r, double phi_ext) {
  const double phi_star = solve_steady_phase(r, phi_ext);
  const double psi = (phi_star - phi_ext) / 3.0;
  const double alpha = r * trig::cos(phi_star) + trig::cos(psi) / 3.0;
  if (!(alpha > 0.0)) {
    throw ModelValidityError("alpha <= 0 at phi_ext=" + std::to_string(phi_ext));
  }
  return constants::reduced_flux_quantum / (i0 * alpha);
}

FluxFit fit_flux_dependence(const std::vector<FluxSample>& data) {
  if (data.size() < 3) throw DataError("flux fit needs at least 3 samples");
  double lo = data.front().phi_ext, hi = lo;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].phi_ext) || !(data[i].l_cell > 0.0)) {
      throw DataError("flux sample " + std::to_string(i) + " needs finite flux and positive inductance");
    }
    lo = std::min(lo, data[i].phi_ext);
    hi = std::max(hi, data[i].phi_ext);
  }
  if (hi - lo < constants::pi * (1.0 - 1e-9)) {
    throw DataError("flux data must span at least half a flux quantum");
  }

  // At zero flux alpha~ = r + 1/3; seed I0 from the smallest inductance.
  constexpr double r_guess = 0.1;
  double l_min = data.front().l_cell;
  for (const auto& s : data) l_min = std::min(l_min, s.l_cell);
  const double i0_guess = constants::reduced_flux_quantum / (l_min * (r_guess + 1.0 / 3.0));

  CurveFitProblem problem;
  problem.initial = Eigen::Vector2d(i0_guess / kMicro, r_guess);
  problem.lower = Eigen::Vector2d(0.1 * i0_guess / kMicro, 0.0);
  problem.upper = Eigen::Vector2d(10.0 * i0_guess / kMicro, kMaxAsymmetry);
  problem.typical = Eigen::Vector2d(i0_guess / kMicro, 0.1);
  problem.residual = [&](const Eigen::VectorXd& p) -> std::optional<Eigen::VectorXd> {
    Eigen::VectorXd res(static_cast<Eigen::Index>(data.size()));
    try {
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double l = cell_inductance(p[0] * kMicro, p[1], data[i].phi_ext);
        res[static_cast<Eigen::Index>(i)] = (l - data[i].l_cell) / kPico;
      }
    } catch (const SolverError&) {
      return std::nullopt;
    } catch (const ModelValidityError&) {
      return std::nullopt;
    }
    return res;
  };

  FluxFit fit;
  fit.engine = least_squares(problem);
  const auto se = fit.engine.standard_errors();
  fit.i0 = fit.engine.parameters[0] * kMicro;
  fit.r = fit.engine.parameters[1];
  fit.i0_se = se[0] * kMicro;
  fit.r_se = se[1];
  return fit;
}

}  // namespace kerrtwpa
