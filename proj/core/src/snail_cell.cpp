#include "kerrtwpa/snail_cell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"
#include "kerrtwpa/trig.hpp"

namespace kerrtwpa {

namespace {

constexpr double kResidualTolerance = 1e-14;
constexpr int kNewtonCap = 100;
// Largest flux increment taken in one continuation step.
constexpr double kContinuationStep = 0.05;

std::string describe_flux(double phi_ext) {
  std::ostringstream os;
  os.precision(17);
  os << "phi_ext=" << phi_ext;
  return os.str();
}

}  // namespace

std::vector<int> SnailParameters::alternating_polarity(std::size_t n_cells) {
  std::vector<int> out(n_cells);
  for (std::size_t n = 0; n < n_cells; ++n) out[n] = (n % 2 == 0) ? 1 : -1;
  return out;
}

SnailParameters SnailParameters::make(double i0, double r, double cg, double cj,
                                      std::size_t n_cells, std::vector<int> polarity) {
  SnailParameters p;
  p.i0 = i0;
  p.r = r;
  p.cg = cg;
  p.cj = cj;
  p.n_cells = n_cells;
  p.polarity = polarity.empty() ? alternating_polarity(n_cells) : std::move(polarity);
  p.validate();
  return p;
}

void SnailParameters::validate() const {
  if (!(i0 > 0.0) || !std::isfinite(i0)) throw ConfigError("device.i0 must be positive");
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("device.r must lie in (0, 1)");
  if (!(cg > 0.0) || !std::isfinite(cg)) throw ConfigError("device.cg must be positive");
  if (!(cj > 0.0) || !std::isfinite(cj)) throw ConfigError("device.cj must be positive");
  if (n_cells < 1) throw ConfigError("device.n_cells must be at least 1");
  if (polarity.size() != n_cells) {
    throw ConfigError("device.polarity length " + std::to_string(polarity.size()) +
                      " does not match n_cells " + std::to_string(n_cells));
  }
  for (std::size_t n = 0; n < polarity.size(); ++n) {
    if (polarity[n] != 1 && polarity[n] != -1) {
      throw ConfigError("device.polarity[" + std::to_string(n) + "] must be +1 or -1");
    }
  }
}

SnailParameters reference_device() {
  return SnailParameters::make(2.19e-6, 0.07, 250e-15, 50e-15, 700);
}

double snail_current(double r, double phi, double phi_ext) {
  return r * trig::sin(phi) + trig::sin((phi - phi_ext) / 3.0);
}

CurrentDerivatives snail_current_derivatives(double r, double phi, double phi_ext) {
  const double psi = (phi - phi_ext) / 3.0;
  const double s = trig::sin(phi);
  const double c = trig::cos(phi);
  const double sp = trig::sin(psi);
  const double cp = trig::cos(psi);
  return {r * c + cp / 3.0, -r * s - sp / 9.0, -r * c - cp / 27.0};
}

double solve_steady_phase_from(double r, double phi_ext, double guess) {
  double x = guess;
  double f = snail_current(r, x, phi_ext);
  for (int it = 0; it < kNewtonCap && std::abs(f) >= kResidualTolerance; ++it) {
    const double df = snail_current_derivatives(r, x, phi_ext).d1;
    if (df == 0.0 || !std::isfinite(df)) break;
    double step = f / df;
    // Damp steps that would jump across a whole lobe of the sine.
    step = std::clamp(step, -0.5, 0.5);
    x -= step;
    f = snail_current(r, x, phi_ext);
  }
  if (!(std::abs(f) < kResidualTolerance) || !std::isfinite(x)) {
    throw SolverError("steady-phase Newton iteration did not converge at " +
                          describe_flux(phi_ext),
                      f);
  }
  // Snap onto an exact multiple of pi when that is an exact root; the loop
  // symmetry points (phi_ext = 0, pi, ...) land there.
  const double n = std::nearbyint(x / constants::pi);
  const double snapped = n * constants::pi;
  if (std::abs(snapped - x) < 1e-9) {
    const double fs = snail_current(r, snapped, phi_ext);
    if (std::abs(fs) <= std::abs(f)) return snapped;
  }
  return x;
}

double solve_steady_phase(const SnailParameters& params, double phi_ext) {
  params.validate();
  return solve_steady_phase(params.r, phi_ext);
}

double solve_steady_phase(double r, double phi_ext) {
  if (!(r >= 0.0 && r < 1.0)) throw ConfigError("asymmetry ratio r must lie in [0, 1)");
  if (!std::isfinite(phi_ext)) throw ConfigError("phi_ext must be finite");
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(phi_ext) / kContinuationStep)));
  double x = 0.0;
  double prev_flux = 0.0;
  for (int s = 1; s <= steps; ++s) {
    const double flux = (s == steps) ? phi_ext : phi_ext * static_cast<double>(s) / steps;
    // Tangent predictor: dphi*/dphi_ext = (1/3) cos(psi) / alpha.
    const auto d = snail_current_derivatives(r, x, prev_flux);
    const double dpsi = trig::cos((x - prev_flux) / 3.0) / 3.0;
    const double guess = (d.d1 > 0.0) ? x + (flux - prev_flux) * dpsi / d.d1 : x;
    x = solve_steady_phase_from(r, flux, guess);
    prev_flux = flux;
  }
  return x;
}

OperatingPoint operating_point_at(const SnailParameters& params, double phi_ext,
                                  double phi_star) {
  using namespace constants;
  const double r = params.r;
  const double psi = (phi_star - phi_ext) / 3.0;
  const double s = trig::sin(phi_star);
  const double c = trig::cos(phi_star);
  const double sp = trig::sin(psi);
  const double cp = trig::cos(psi);

  OperatingPoint op;
  op.phi_ext = phi_ext;
  op.phi_star = phi_star;
  op.alpha = r * c + cp / 3.0;
  op.beta = 0.5 * (r * s + sp / 9.0);
  op.gamma = (r * c + cp / 27.0) / 6.0;
  if (!(op.alpha > 0.0)) {
    throw ModelValidityError("unphysical branch: alpha <= 0 at " + describe_flux(phi_ext));
  }
  op.c_ground = params.cg;
  op.c_junction = params.cj;
  op.l_cell = flux_quantum / (two_pi * params.i0 * op.alpha);
  op.z_char = std::sqrt(op.l_cell / params.cg);
  op.omega0 = 1.0 / std::sqrt(op.l_cell * params.cg);
  op.omega_j = 1.0 / std::sqrt(op.l_cell * params.cj);

  const double charging_energy = elementary_charge * elementary_charge / (2.0 * params.cg);
  op.g3 = op.beta / (3.0 * op.alpha) * std::sqrt(charging_energy * hbar * op.omega0) / hbar;
  op.g4 = op.gamma / (2.0 * op.alpha) * charging_energy / hbar;
  return op;
}

OperatingPoint operating_point(const SnailParameters& params, double phi_ext) {
  return operating_point_at(params, phi_ext, solve_steady_phase(params, phi_ext));
}

std::vector<OperatingPoint> flux_sweep(const SnailParameters& params, std::size_t n_points) {
  params.validate();
  if (n_points < 2) throw ConfigError("flux sweep needs at least 2 points");
  std::vector<OperatingPoint> out;
  out.reserve(n_points);
  double x = 0.0;
  double prev_flux = 0.0;
  for (std::size_t k = 0; k < n_points; ++k) {
    const double flux =
        (k + 1 == n_points) ? constants::two_pi
                            : constants::two_pi * static_cast<double>(k) / (n_points - 1);
    const int sub = std::max(1, static_cast<int>(std::ceil((flux - prev_flux) / kContinuationStep)));
    try {
      for (int s = 1; s <= sub; ++s) {
        const double f = (s == sub) ? flux : prev_flux + (flux - prev_flux) * s / sub;
        x = solve_steady_phase_from(params.r, f, x);
      }
      out.push_back(operating_point_at(params, flux, x));
    } catch (const SolverError& e) {
      throw SolverError(std::string("flux sweep failed at ") + describe_flux(flux) + ": " +
                            e.what(),
                        e.last_residual());
    }
    prev_flux = flux;
  }
  return out;
}

double flux_of_max_g3(const SnailParameters& params) {
  constexpr std::size_t coarse = 201;
  const auto sweep = flux_sweep(params, 2 * (coarse - 1) + 1);
  std::size_t best = 0;
  for (std::size_t k = 0; k < coarse; ++k) {
    if (std::abs(sweep[k].g3) > std::abs(sweep[best].g3)) best = k;
  }
  const double h = constants::two_pi / (2 * (coarse - 1));
  double a = sweep[best].phi_ext - h;
  double b = sweep[best].phi_ext + h;
  a = std::max(a, 0.0);
  b = std::min(b, constants::pi);
  auto score = [&](double phi) { return -std::abs(operating_point(params, phi).g3); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = score(c);
  double fd = score(d);
  while (b - a > 1e-9) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = score(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace kerrtwpa
