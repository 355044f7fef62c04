#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace kerrtwpa {

using Complex = std::complex<double>;

struct TwoPortABCD {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};  // ohms
  Complex c{0.0, 0.0};  // siemens
  Complex d{1.0, 0.0};

  static TwoPortABCD identity() { return {}; }
  [[nodiscard]] Complex det() const { return a * d - b * c; }
};

/// Cascade: `lhs` sits on the input side.
TwoPortABCD operator*(const TwoPortABCD& lhs, const TwoPortABCD& rhs);

enum class ModulationPhase {
  in_phase,    // L_n and C_n share the same sine; impedance stays fixed
  anti_phase,  // C_n uses the opposite sign, so impedance is modulated
};

struct LadderSpec {
  double l_cell = 240e-12;
  double c_cell = 96e-15;
  std::size_t n_cells = 700;
  double modulation_amplitude = 0.0;
  std::size_t modulation_period = 12;
  bool modulate_inductance = true;
  bool modulate_capacitance = true;
  ModulationPhase capacitance_phase = ModulationPhase::anti_phase;

  /// Throws ConfigError on a non-physical element or modulation setting.
  void validate() const;
  [[nodiscard]] bool modulated() const { return modulation_amplitude != 0.0; }
  /// Inductance and capacitance of cell n, L(1 + m sin(2 pi n / period)).
  [[nodiscard]] double inductance(std::size_t n) const;
  [[nodiscard]] double capacitance(std::size_t n) const;
  /// Lowest ladder cutoff 2/sqrt(L_n C_n) over one modulation period.
  [[nodiscard]] double cutoff() const;
};

/// Series inductance followed by shunt capacitance.
TwoPortABCD cell_abcd(double l, double c, double omega);

/// Ordered product of `cells`; ConfigError when empty.
TwoPortABCD chain(const std::vector<TwoPortABCD>& cells);

/// Total ABCD of the ladder at one frequency.
TwoPortABCD ladder_abcd(const LadderSpec& spec, double omega);

/// One modulation period of cells (a single cell when unmodulated).
TwoPortABCD supercell_abcd(const LadderSpec& spec, double omega);

struct BlochImpedance {
  double omega = 0.0;
  Complex z;
  /// Set when |a + d|/2 > 1: z is then purely imaginary and no wave propagates.
  bool stop_band = false;
};

/// Bloch impedance of the repeating unit, b / sqrt((a+d)^2/4 - 1), with the
/// root chosen for Re z >= 0. ConfigError if a grid point is at or above
/// the ladder cutoff.
std::vector<BlochImpedance> characteristic_impedance(const LadderSpec& spec,
                                                     const std::vector<double>& omega_grid);

/// S21 = 2/(a + b/z0 + c z0 + d) of a whole network.
Complex transmission(const TwoPortABCD& network, double z0);
Complex reflection(const TwoPortABCD& network, double z0);

std::vector<Complex> transmission(const LadderSpec& spec, double z0,
                                  const std::vector<double>& omega_grid);

/// (z - z0)/(z + z0).
double reflection_coefficient(double z, double z0);

/// Peak-to-peak ripple in dB from the first reflection round trip,
/// rho = g |gamma1 gamma2| with g the amplitude gain. ModelValidityError
/// when rho >= 1 or a reflection magnitude is not below 1.
double ripple_peak_to_peak(double gain_db, double gamma1, double gamma2);

}  // namespace kerrtwpa
