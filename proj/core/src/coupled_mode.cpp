#include "kerrtwpa/coupled_mode.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa {

namespace {

std::string ghz(double omega) {
  std::ostringstream os;
  os << units::rad_per_s_to_ghz(omega) << " GHz";
  return os.str();
}

double reduced_frequency(const OperatingPoint& op, double omega) {
  const double x = omega / op.omega_j;
  return 1.0 - x * x;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

PumpDrive PumpDrive::from_amplitude(double omega_p, double a_p0) {
  if (!(omega_p > 0.0)) throw ConfigError("pump frequency must be positive");
  if (!(a_p0 >= 0.0) || !std::isfinite(a_p0)) {
    throw ConfigError("pump amplitude must be finite and non-negative");
  }
  PumpDrive p;
  p.omega_p = omega_p;
  p.a_p0 = a_p0;
  return p;
}

PumpDrive PumpDrive::from_power(const OperatingPoint& op, double omega_p, double power_dbm) {
  PumpDrive p = from_amplitude(omega_p, pump_amplitude_from_power(op, omega_p, power_dbm));
  p.input_power_dbm = power_dbm;
  return p;
}

double pump_amplitude_from_power(const OperatingPoint& op, double omega_p, double power_dbm) {
  const double power = units::dbm_to_watts(power_dbm);
  const double current = std::sqrt(2.0 * power / op.z_char);
  const double phase_slope = op.l_cell * current / constants::reduced_flux_quantum;
  return phase_slope / wavevector(op, omega_p);
}

double pump_power_from_amplitude(const OperatingPoint& op, double omega_p, double a_p) {
  const double phase_slope = a_p * wavevector(op, omega_p);
  const double current = phase_slope * constants::reduced_flux_quantum / op.l_cell;
  const double power = current * current * op.z_char / 2.0;
  return units::watts_to_dbm(power);
}

KerrShifts kerr_phase_shifts(const OperatingPoint& op, double omega_s, double omega_p,
                             double a_p) {
  const double omega_i = 2.0 * omega_p - omega_s;
  if (!(omega_i > 0.0)) throw ModelValidityError("idler frequency " + ghz(omega_i) + " is not positive");
  const double k_s = wavevector(op, omega_s);
  const double k_i = wavevector(op, omega_i);
  const double k_p = wavevector(op, omega_p);
  const double gamma = op.kerr_coefficient();
  const double a2 = a_p * a_p;

  KerrShifts out;
  out.eta_s = 6.0 * gamma / (8.0 * reduced_frequency(op, omega_s)) * k_p * k_p * k_s * a2;
  out.eta_i = 6.0 * gamma / (8.0 * reduced_frequency(op, omega_i)) * k_p * k_p * k_i * a2;
  out.eta_p = 3.0 * gamma / (8.0 * reduced_frequency(op, omega_p)) * k_p * k_p * k_p * a2;
  out.delta_k_kerr = out.eta_s + out.eta_i - 2.0 * out.eta_p;
  return out;
}

CoupledModeSystem::CoupledModeSystem(const Inputs& in) : in_(in) {
  if (in_.n_cells == 0) throw ConfigError("coupled-mode system needs n_cells >= 1");
  if (!(in_.k_s > 0.0) || !(in_.k_i > 0.0)) {
    throw ModelValidityError("signal and idler wavevectors must be positive");
  }
  if (in_.kappa2_s < 0.0 || in_.kappa2_i < 0.0 || in_.kappa2_p < 0.0) {
    throw ModelValidityError("attenuation constants must be non-negative");
  }
  const auto& k = in_.kerr;
  const int s = sign_of(k.eta_p);
  if (sign_of(k.eta_s) != s || sign_of(k.eta_i) != s) {
    throw ModelValidityError("Kerr phase-modulation rates must share one sign");
  }
  const double expected = k.eta_s + k.eta_i - 2.0 * k.eta_p;
  const double scale = std::abs(k.eta_s) + std::abs(k.eta_i) + 2.0 * std::abs(k.eta_p);
  if (std::abs(k.delta_k_kerr - expected) > 1e-12 * scale) {
    throw ModelValidityError("delta_k_kerr inconsistent with eta_s + eta_i - 2 eta_p");
  }
}

CoupledModeSystem CoupledModeSystem::build(const OperatingPoint& op, double omega_s,
                                           const PumpDrive& pump, const LossProfile* loss,
                                           std::size_t n_cells) {
  return build(op, omega_s, pump, loss, loss, n_cells);
}

CoupledModeSystem CoupledModeSystem::build(const OperatingPoint& op, double omega_s,
                                           const PumpDrive& pump, const LossProfile* loss,
                                           const LossProfile* pump_loss, std::size_t n_cells) {
  const double omega_p = pump.omega_p;
  const double omega_i = 2.0 * omega_p - omega_s;
  Inputs in;
  in.n_cells = n_cells;
  in.delta_k_dispersion = delta_k_dispersion(op, omega_s, omega_p);
  const auto ms = mode_at(op, omega_s, loss, n_cells);
  const auto mi = mode_at(op, omega_i, loss, n_cells);
  const auto mp = mode_at(op, omega_p, pump_loss, n_cells);
  in.k_s = ms.k;
  in.k_i = mi.k;
  in.kappa2_s = ms.kappa2;
  in.kappa2_i = mi.kappa2;
  in.kappa2_p = mp.kappa2;
  const double attenuated = pump.a_p0 * std::exp(-mp.kappa2 * static_cast<double>(n_cells) / 2.0);
  in.kerr = kerr_phase_shifts(op, omega_s, omega_p, attenuated);
  return CoupledModeSystem(in);
}

Matrix2c CoupledModeSystem::generator() const {
  const Complex i(0.0, 1.0);
  const double dk = delta_k();
  Matrix2c phi;
  phi(0, 0) = -i * dk / 2.0 - in_.kappa2_s;
  phi(0, 1) = i * (in_.k_i / (2.0 * in_.k_s)) * in_.kerr.eta_s;
  phi(1, 0) = -i * (in_.k_s / (2.0 * in_.k_i)) * in_.kerr.eta_i;
  phi(1, 1) = i * dk / 2.0 - in_.kappa2_i;
  return phi;
}

Matrix2c CoupledModeSystem::flux_generator() const {
  Matrix2c phi = generator();
  const double c1 = in_.k_i / (2.0 * in_.k_s) * in_.kerr.eta_s;
  const double c2 = in_.k_s / (2.0 * in_.k_i) * in_.kerr.eta_i;
  const double c = (c1 < 0.0 ? -1.0 : 1.0) * std::sqrt(c1 * c2);
  const Complex i(0.0, 1.0);
  phi(0, 1) = i * c;
  phi(1, 0) = -i * c;
  return phi;
}

CoupledModeSystem CoupledModeSystem::lossless() const {
  Inputs in = in_;
  in.kappa2_s = in.kappa2_i = in.kappa2_p = 0.0;
  return CoupledModeSystem(in);
}

Matrix2c propagate(const CoupledModeSystem& system) {
  return expm(system.flux_generator() * static_cast<double>(system.n_cells())).value;
}

double analytic_power_gain(double eta_s, double eta_i, double delta_k, std::size_t n_cells) {
  // cosh^2(gN) + (dk^2/4g^2) sinh^2(gN) = 1 + (eta_s eta_i / 4) (sinh(gN)/g)^2,
  // using 4g^2 + dk^2 = eta_s eta_i. sinh(gN)/g continues to sin(qN)/q for
  // g = iq and to N at g = 0.
  const double n = static_cast<double>(n_cells);
  const double radicand = eta_s * eta_i - delta_k * delta_k;
  double transfer = n;
  if (radicand > 0.0) {
    const double g = std::sqrt(radicand) / 2.0;
    transfer = (g * n < 1e-8) ? n : std::sinh(g * n) / g;
  } else if (radicand < 0.0) {
    const double q = std::sqrt(-radicand) / 2.0;
    transfer = (q * n < 1e-8) ? n : std::sin(q * n) / q;
  }
  return 1.0 + eta_s * eta_i / 4.0 * transfer * transfer;
}

double analytic_gain_lossless(const OperatingPoint& op, double omega_s, const PumpDrive& pump,
                              std::size_t n_cells) {
  const auto kerr = kerr_phase_shifts(op, omega_s, pump.omega_p, pump.a_p0);
  const double dk = delta_k_dispersion(op, omega_s, pump.omega_p) + kerr.delta_k_kerr;
  return units::power_ratio_to_db(analytic_power_gain(kerr.eta_s, kerr.eta_i, dk, n_cells));
}

double check_pump_validity(const OperatingPoint& op, const PumpDrive& pump,
                           const LossProfile* loss, std::size_t n_cells) {
  const double k_p = wavevector(op, pump.omega_p);
  const double kappa_p = loss ? kappa_from_loss(*loss, n_cells, pump.omega_p) : 0.0;
  const double amplitude = pump.a_p0 * std::exp(-kappa_p * static_cast<double>(n_cells) / 2.0);
  const double drop = k_p * amplitude;
  if (!(drop < kPumpPhaseLimit)) {
    std::ostringstream os;
    os << "pump phase drop per cell k_p|A_p| = " << drop << " rad at " << ghz(pump.omega_p)
       << " exceeds the weak-nonlinearity limit of " << kPumpPhaseLimit << " rad";
    throw ModelValidityError(os.str());
  }
  return drop;
}

GainProfile gain_profile(const OperatingPoint& op, const PumpDrive& pump,
                         const LossProfile& loss, const std::vector<double>& omega_s_grid,
                         std::size_t n_cells) {
  GainProfile out;
  out.pump_phase_drop = check_pump_validity(op, pump, &loss, n_cells);
  out.pump_warning = out.pump_phase_drop > kPumpPhaseWarning;
  out.points.reserve(omega_s_grid.size());
  const double n = static_cast<double>(n_cells);
  for (const double omega_s : omega_s_grid) {
    try {
      const auto system = CoupledModeSystem::build(op, omega_s, pump, &loss, n_cells);
      const Matrix2c s = propagate(system);
      GainPoint pt;
      pt.omega_s = omega_s;
      pt.gain_db = 20.0 * std::log10(std::abs(s(0, 0)));
      // Pump-off transmission is exp(-kappa2_s N) in amplitude.
      pt.net_gain_db = pt.gain_db + 20.0 * system.inputs().kappa2_s * n / std::numbers::ln10;
      pt.delta_k_out = system.delta_k() * n;
      out.points.push_back(pt);
    } catch (const ModelValidityError& e) {
      out.diagnostics.push_back("skipped " + ghz(omega_s) + ": " + e.what());
    } catch (const DataError& e) {
      out.diagnostics.push_back("skipped " + ghz(omega_s) + ": " + e.what());
    }
  }
  return out;
}

double total_delta_k(const OperatingPoint& op, double omega_s, const PumpDrive& pump) {
  return delta_k_dispersion(op, omega_s, pump.omega_p) +
         kerr_phase_shifts(op, omega_s, pump.omega_p, pump.a_p0).delta_k_kerr;
}

std::vector<double> phase_matched_frequencies(const OperatingPoint& op, const PumpDrive& pump,
                                              std::size_t scan_points) {
  const double omega_p = pump.omega_p;
  if (!(omega_p < op.omega_j)) {
    throw ModelValidityError("pump at " + ghz(omega_p) + " is above the plasma cutoff");
  }
  const auto centre = kerr_phase_shifts(op, omega_p, omega_p, pump.a_p0);
  if (centre.delta_k_kerr == 0.0) return {omega_p};

  // Delta k is symmetric under signal/idler exchange, so roots are searched
  // below the pump and mirrored.
  const double lo = std::max(0.0, 2.0 * omega_p - op.omega_j);
  const double resolution = constants::two_pi * 1e3;
  if (scan_points < 3) scan_points = 3;
  auto dk = [&](double w) { return total_delta_k(op, w, pump); };

  std::vector<double> lower_roots;
  double prev_w = lo + (omega_p - lo) / static_cast<double>(scan_points - 1);
  double prev_v = dk(prev_w);
  for (std::size_t j = 2; j < scan_points; ++j) {
    const double w = lo + (omega_p - lo) * static_cast<double>(j) / (scan_points - 1);
    if (!(w < omega_p)) break;
    const double v = dk(w);
    if (v == 0.0) {
      lower_roots.push_back(w);
    } else if (prev_v != 0.0 && sign_of(v) != sign_of(prev_v)) {
      double a = prev_w, b = w, fa = prev_v;
      while (b - a > resolution) {
        const double m = 0.5 * (a + b);
        const double fm = dk(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (sign_of(fm) == sign_of(fa)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      lower_roots.push_back(0.5 * (a + b));
    }
    prev_w = w;
    prev_v = v;
  }

  std::vector<double> roots;
  roots.reserve(2 * lower_roots.size());
  for (double w : lower_roots) roots.push_back(w);
  for (auto it = lower_roots.rbegin(); it != lower_roots.rend(); ++it) {
    roots.push_back(2.0 * omega_p - *it);
  }
  return roots;
}

}  // namespace kerrtwpa
