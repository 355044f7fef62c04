#include "kerrtwpa/microwave_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa {

TwoPortABCD operator*(const TwoPortABCD& lhs, const TwoPortABCD& rhs) {
  return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
          lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

void LadderSpec::validate() const {
  if (!(l_cell > 0.0) || !(c_cell > 0.0)) {
    throw ConfigError("ladder needs positive l_cell and c_cell");
  }
  if (n_cells == 0) throw ConfigError("ladder needs n_cells >= 1");
  if (!(modulation_amplitude >= 0.0) || !(modulation_amplitude < 1.0)) {
    throw ConfigError("modulation_amplitude must lie in [0, 1), got " +
                      std::to_string(modulation_amplitude));
  }
  if (modulated() && modulation_period < 2) {
    throw ConfigError("modulation_period must be >= 2 cells when modulation is on");
  }
}

namespace {

double modulation(const LadderSpec& spec, std::size_t n) {
  if (!spec.modulated()) return 0.0;
  const double phase = constants::two_pi * static_cast<double>(n % spec.modulation_period) /
                       static_cast<double>(spec.modulation_period);
  return spec.modulation_amplitude * std::sin(phase);
}

}  // namespace

double LadderSpec::inductance(std::size_t n) const {
  return modulate_inductance ? l_cell * (1.0 + modulation(*this, n)) : l_cell;
}

double LadderSpec::capacitance(std::size_t n) const {
  if (!modulate_capacitance) return c_cell;
  const double sign = capacitance_phase == ModulationPhase::in_phase ? 1.0 : -1.0;
  return c_cell * (1.0 + sign * modulation(*this, n));
}

double LadderSpec::cutoff() const {
  const std::size_t span = modulated() ? modulation_period : 1;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < span; ++n) {
    lowest = std::min(lowest, 2.0 / std::sqrt(inductance(n) * capacitance(n)));
  }
  return lowest;
}

TwoPortABCD cell_abcd(double l, double c, double omega) {
  const Complex zl{0.0, omega * l};
  const Complex yc{0.0, omega * c};
  return {1.0 + zl * yc, zl, yc, 1.0};
}

TwoPortABCD chain(const std::vector<TwoPortABCD>& cells) {
  if (cells.empty()) throw ConfigError("chain needs at least one two-port");
  TwoPortABCD total = cells.front();
  for (std::size_t i = 1; i < cells.size(); ++i) total = total * cells[i];
  return total;
}

TwoPortABCD supercell_abcd(const LadderSpec& spec, double omega) {
  const std::size_t span = spec.modulated() ? spec.modulation_period : 1;
  TwoPortABCD total;
  for (std::size_t n = 0; n < span; ++n) {
    total = total * cell_abcd(spec.inductance(n), spec.capacitance(n), omega);
  }
  return total;
}

TwoPortABCD ladder_abcd(const LadderSpec& spec, double omega) {
  TwoPortABCD total;
  if (!spec.modulated()) {
    // Repeated squaring keeps the product short for long uniform ladders.
    TwoPortABCD base = cell_abcd(spec.l_cell, spec.c_cell, omega);
    for (std::size_t n = spec.n_cells; n > 0; n >>= 1) {
      if (n & 1U) total = total * base;
      base = base * base;
    }
    return total;
  }
  for (std::size_t n = 0; n < spec.n_cells; ++n) {
    total = total * cell_abcd(spec.inductance(n), spec.capacitance(n), omega);
  }
  return total;
}

std::vector<BlochImpedance> characteristic_impedance(const LadderSpec& spec,
                                                     const std::vector<double>& omega_grid) {
  spec.validate();
  const double cutoff = spec.cutoff();
  std::vector<BlochImpedance> out;
  out.reserve(omega_grid.size());
  for (const double omega : omega_grid) {
    if (!(omega > 0.0) || omega >= cutoff) {
      throw ConfigError("impedance grid point " +
                        std::to_string(units::rad_per_s_to_ghz(omega)) +
                        " GHz is outside (0, ladder cutoff)");
    }
    const TwoPortABCD m = supercell_abcd(spec, omega);
    const Complex half_trace = 0.5 * (m.a + m.d);
    Complex z = m.b / std::sqrt(half_trace * half_trace - 1.0);
    if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) z = -z;
    out.push_back({omega, z, std::abs(half_trace.real()) > 1.0});
  }
  return out;
}

Complex transmission(const TwoPortABCD& m, double z0) {
  return 2.0 / (m.a + m.b / z0 + m.c * z0 + m.d);
}

Complex reflection(const TwoPortABCD& m, double z0) {
  return (m.a + m.b / z0 - m.c * z0 - m.d) / (m.a + m.b / z0 + m.c * z0 + m.d);
}

std::vector<Complex> transmission(const LadderSpec& spec, double z0,
                                  const std::vector<double>& omega_grid) {
  spec.validate();
  if (!(z0 > 0.0)) throw ConfigError("reference impedance z0 must be positive");
  std::vector<Complex> out;
  out.reserve(omega_grid.size());
  for (const double omega : omega_grid) {
    if (omega < 0.0) throw ConfigError("transmission needs omega >= 0");
    out.push_back(transmission(ladder_abcd(spec, omega), z0));
  }
  return out;
}

double reflection_coefficient(double z, double z0) {
  if (!(z > 0.0) || !(z0 > 0.0)) throw ConfigError("impedances must be positive");
  return (z - z0) / (z + z0);
}

double ripple_peak_to_peak(double gain_db, double gamma1, double gamma2) {
  if (!(std::abs(gamma1) < 1.0) || !(std::abs(gamma2) < 1.0)) {
    throw ModelValidityError("reflection coefficients must have magnitude below 1");
  }
  const double g = std::pow(10.0, gain_db / 20.0);
  const double rho = g * std::abs(gamma1 * gamma2);
  if (!(rho < 1.0)) {
    throw ModelValidityError("first-order ripple model invalid: round-trip ratio " +
                             std::to_string(rho) + " >= 1");
  }
  return 20.0 * std::log10((1.0 + rho) / (1.0 - rho));
}

}  // namespace kerrtwpa
