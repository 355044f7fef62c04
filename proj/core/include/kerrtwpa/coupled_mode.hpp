#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kerrtwpa/dispersion.hpp"
#include "kerrtwpa/matrix2.hpp"
#include "kerrtwpa/snail_cell.hpp"

namespace kerrtwpa {

/// Per-cell phase drop k_p |A_p| above which a warning is raised, and at
/// or above which the weak-nonlinearity expansion is rejected.
inline constexpr double kPumpPhaseWarning = 0.5;
inline constexpr double kPumpPhaseLimit = 1.0;

/// Strong pump tone. The amplitude is the peak of the node-phase wave
/// phi(x, t) = a_p0 sin(k_p x - omega_p t) at the input of the line.
struct PumpDrive {
  double omega_p = 0.0;
  double a_p0 = 0.0;
  std::optional<double> input_power_dbm;

  static PumpDrive from_amplitude(double omega_p, double a_p0);
  /// Converts power to amplitude with pump_amplitude_from_power.
  static PumpDrive from_power(const OperatingPoint& op, double omega_p, double power_dbm);
};

/// Amplitude of a traveling wave of the given power on the line: current
/// sqrt(2P/Z), phase slope (2pi/Phi0) L I, divided by k_p.
double pump_amplitude_from_power(const OperatingPoint& op, double omega_p, double power_dbm);

/// Inverse of pump_amplitude_from_power.
double pump_power_from_amplitude(const OperatingPoint& op, double omega_p, double a_p);

/// Cross- and self-phase modulation rates (rad/cell).
struct KerrShifts {
  double eta_s = 0.0;
  double eta_i = 0.0;
  double eta_p = 0.0;
  double delta_k_kerr = 0.0;
};

/// eta_{s,i} = (6 gamma / 8 w~_{s,i}) k_p^2 k_{s,i} |A_p|^2,
/// eta_p = (3 gamma / 8 w~_p) k_p^3 |A_p|^2, with w~_m = 1 - omega_m^2/omega_J^2
/// and gamma = gamma~/alpha~.
///
/// gamma~/alpha~ is the coefficient of the cubic term once g4 is written in
/// terms of the expansion coefficients: 8 g4 R_Q / (pi omega0 Z) with
/// hbar g4 = (gamma~/2alpha~) e^2/(2 Cg) and R_Q = pi hbar / (2 e^2) reduces to
/// (gamma~/alpha~) / (omega0 Z Cg), and omega0 Z Cg = 1.
KerrShifts kerr_phase_shifts(const OperatingPoint& op, double omega_s, double omega_p,
                             double a_p);

/// Frozen (x-independent) generator of signal/idler propagation at one
/// signal frequency, in the stiff-pump approximation.
class CoupledModeSystem {
 public:
  struct Inputs {
    double delta_k_dispersion = 0.0;
    KerrShifts kerr;
    double k_s = 0.0;
    double k_i = 0.0;
    double kappa2_s = 0.0;
    double kappa2_i = 0.0;
    double kappa2_p = 0.0;
    std::size_t n_cells = 0;
  };

  /// Checks invariants: Kerr rates share one sign, delta_k_kerr equals
  /// eta_s + eta_i - 2 eta_p, attenuations non-negative, k's positive.
  explicit CoupledModeSystem(const Inputs& in);

  /// Builds the system for a device bias, pump and signal. Pump attenuation
  /// enters as |A_p| = a_p0 exp(-kappa2_p N / 2). `loss` may be null.
  static CoupledModeSystem build(const OperatingPoint& op, double omega_s,
                                 const PumpDrive& pump, const LossProfile* loss,
                                 std::size_t n_cells);

  /// Same with a separate profile for the pump attenuation, for pumps that
  /// see a different (power-dependent) loss than the weak signal and idler.
  static CoupledModeSystem build(const OperatingPoint& op, double omega_s,
                                 const PumpDrive& pump, const LossProfile* loss,
                                 const LossProfile* pump_loss, std::size_t n_cells);

  [[nodiscard]] double delta_k() const { return in_.delta_k_dispersion + in_.kerr.delta_k_kerr; }
  [[nodiscard]] const Inputs& inputs() const { return in_; }
  [[nodiscard]] std::size_t n_cells() const { return in_.n_cells; }

  /// Generator with the coupling entries i (k_i/2k_s) eta_s and
  /// -i (k_s/2k_i) eta_i (field-amplitude normalization).
  [[nodiscard]] Matrix2c generator() const;

  /// Same generator after the diagonal rescaling of the idler amplitude
  /// that makes the couplings +-i sqrt(eta_s eta_i)/2 (photon-flux
  /// normalization). Identical diagonal and eigenvalues.
  [[nodiscard]] Matrix2c flux_generator() const;

  /// Same system with all attenuations set to zero.
  [[nodiscard]] CoupledModeSystem lossless() const;

 private:
  Inputs in_;
};

/// Scattering matrix S(N) = exp(Phi N) in photon-flux normalization.
/// Gains |S11|^2, |S22|^2 equal those of the field-amplitude form; in the
/// lossless case |S11|^2 - |S12|^2 = 1.
Matrix2c propagate(const CoupledModeSystem& system);

/// Lossless closed-form power gain cosh^2(gN) + (dk^2/4g^2) sinh^2(gN) with
/// g = sqrt(eta_s eta_i - dk^2)/2, continued to cos/sin below threshold.
/// Returns the linear power gain.
double analytic_power_gain(double eta_s, double eta_i, double delta_k, std::size_t n_cells);

/// analytic_power_gain for a device and pump, in dB. Assumes no loss (the
/// pump amplitude enters unattenuated).
double analytic_gain_lossless(const OperatingPoint& op, double omega_s, const PumpDrive& pump,
                              std::size_t n_cells);

/// Per-cell pump phase drop k_p |A_p| for the position-averaged amplitude.
/// Throws ModelValidityError at or above kPumpPhaseLimit.
double check_pump_validity(const OperatingPoint& op, const PumpDrive& pump,
                           const LossProfile* loss, std::size_t n_cells);

struct GainPoint {
  double omega_s = 0.0;
  double gain_db = 0.0;      // 20 log10 |S11|, includes line loss
  double net_gain_db = 0.0;  // pump-on relative to pump-off transmission
  double delta_k_out = 0.0;  // total mismatch over the device, rad
};

struct GainProfile {
  std::vector<GainPoint> points;
  /// One entry per skipped signal frequency.
  std::vector<std::string> diagnostics;
  double pump_phase_drop = 0.0;
  bool pump_warning = false;
};

/// Gain over a grid of signal frequencies. Points whose signal or idler is
/// above cutoff or outside the loss profile are skipped with a diagnostic;
/// pump-level errors propagate.
GainProfile gain_profile(const OperatingPoint& op, const PumpDrive& pump,
                         const LossProfile& loss, const std::vector<double>& omega_s_grid,
                         std::size_t n_cells);

/// Total mismatch delta_k_dispersion + delta_k_kerr for the unattenuated pump.
double total_delta_k(const OperatingPoint& op, double omega_s, const PumpDrive& pump);

/// Signal frequencies with total delta_k = 0, as mirror pairs around omega_p
/// sorted ascending. Sign changes are bracketed on a scan grid and refined
/// by bisection to 1 kHz. With zero Kerr shift the degenerate point omega_p
/// is returned alone.
std::vector<double> phase_matched_frequencies(const OperatingPoint& op, const PumpDrive& pump,
                                              std::size_t scan_points = 4001);

}  // namespace kerrtwpa
