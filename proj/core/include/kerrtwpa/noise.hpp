#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kerrtwpa/coupled_mode.hpp"
#include "kerrtwpa/dispersion.hpp"
#include "kerrtwpa/snail_cell.hpp"

namespace kerrtwpa::noise {

/// Highest source temperature admitted into TWPA noise fits; hotter data
/// drives the amplifier towards saturation.
inline constexpr double kMaxFitTemperature = 0.400;  // K

/// One radiometer reading: power `psd_watts` integrated over bandwidth `b_w`
/// with the thermal source at `t_source`.
struct RadiometerSample {
  double omega = 0.0;     // rad/s
  double t_source = 0.0;  // K
  double psd_watts = 0.0;
  double b_w = 0.0;       // Hz
};

/// Symmetrized spectral density emitted by a matched load at temperature t:
/// (hbar omega / 2) coth(hbar omega / 2 k_B t), in W/Hz.
double source_occupation(double omega, double t);

/// Energy density in W/Hz expressed as photons at omega, and back.
double to_photons(double omega, double energy_density);
double from_photons(double omega, double photons);
/// Noise temperature equivalent of n photons at omega: hbar omega n / k_B.
double photons_to_kelvin(double omega, double photons);

enum class ModelKind { single_mode, two_mode };
const char* to_string(ModelKind kind);

/// How the idler-input term is weighted in the two-mode fit.
enum class IdlerGain {
  tied,      // idler-path power gain G_T(omega_s) - 1
  measured,  // independently supplied G_T(omega_i)
};

struct OutputLineRecord {
  double omega = 0.0;
  double g_out = 0.0;  // linear
  double g_out_se = 0.0;
  double n_out = 0.0;  // photons
  double n_out_se = 0.0;
};

/// Fits P = (N_source + N_out) G_out B_w at each distinct frequency in
/// `samples` by linear least squares in N_source. Requires three or more
/// temperatures per frequency whose occupations span a factor of 2;
/// DataError on a degenerate design.
std::vector<OutputLineRecord> fit_output_line(const std::vector<RadiometerSample>& samples);

struct NoiseRecord {
  double omega = 0.0;
  double g_out = 0.0;
  double n_out = 0.0;   // photons
  double g_twpa = 0.0;  // linear
  double n_twpa = 0.0;  // photons at omega
  double g_twpa_se = 0.0;
  double n_twpa_se = 0.0;
  ModelKind model = ModelKind::two_mode;
};

struct NoiseFit {
  std::vector<NoiseRecord> records;
};

struct TwpaFitOptions {
  double omega_p = 0.0;  // sets omega_i = 2 omega_p - omega_s
  ModelKind model = ModelKind::two_mode;
  IdlerGain idler_gain = IdlerGain::tied;
  /// Per-frequency idler-path gains, parallel to the frequencies being fit;
  /// used only with IdlerGain::measured.
  std::vector<std::pair<double, double>> measured_idler_gain;  // (omega_s, linear gain)
};

/// Fits TWPA gain and added noise at each sample frequency from PSD versus
/// source temperature, using an output-line calibration. Samples hotter
/// than kMaxFitTemperature are discarded first.
///
/// Two-mode: P/(G_out B_w) = G (N_s + N_T) + G_i N_i + N_out with G_i either
/// G - 1 or measured. Single-mode drops the idler term.
NoiseFit fit_twpa_noise(const std::vector<RadiometerSample>& samples,
                        const std::vector<OutputLineRecord>& out_calibration,
                        const TwpaFitOptions& options);

/// Generating parameters at one frequency for synthetic radiometer data.
struct SyntheticTruth {
  double omega = 0.0;
  double omega_p = 0.0;   // only for TWPA models
  double g_out = 1.0;
  double n_out = 0.0;     // photons
  double b_w = 1.0;
  /// Absent: output-line reference measurement (no TWPA in the chain).
  std::optional<double> g_twpa;
  double n_twpa = 0.0;    // photons
  /// Idler-path gain; defaults to g_twpa - 1 when absent.
  std::optional<double> g_idler;
  ModelKind model = ModelKind::two_mode;
};

/// Forward model evaluation, noise-free.
double radiometer_power(const SyntheticTruth& truth, double t_source);

/// One sample per (truth, temperature), each multiplied by (1 + f z) with z
/// standard normal from a generator seeded with `seed`. Deterministic.
std::vector<RadiometerSample> synthesize_radiometer(const std::vector<SyntheticTruth>& truths,
                                                    const std::vector<double>& temperatures,
                                                    std::uint64_t seed,
                                                    double noise_fraction = 0.0);

struct AddedNoise {
  double omega_s = 0.0;
  double gain = 0.0;            // |S11|^2, includes loss
  double output_photons = 0.0;  // symmetrized occupation at the output
  /// Input-referred excess over amplified vacuum, normalized by (G - 1):
  /// exactly 1/2 for the ideal lossless phase-preserving amplifier.
  double added_photons = 0.0;
  /// Same excess divided by G.
  double added_photons_per_gain = 0.0;
  double commutator = 0.0;  // should equal 1
};

/// Propagates symmetrized second moments through the line cell by cell.
/// Each cell applies the lossless coupled-mode step, then a beam splitter
/// of amplitude transmission exp(-kappa2) per mode that injects a
/// half-photon bath with weight 1 - exp(-2 kappa2). ModelValidityError when
/// the resulting gain does not exceed unity. `pump_loss`, when given,
/// replaces `loss` for the pump attenuation only.
AddedNoise simulate_added_noise(const OperatingPoint& op, const PumpDrive& pump,
                                const LossProfile& loss, double omega_s, std::size_t n_cells,
                                const LossProfile* pump_loss = nullptr);

/// Same, from an already-built system (its attenuations are used as-is).
AddedNoise simulate_added_noise(const CoupledModeSystem& system, double omega_s);

}  // namespace kerrtwpa::noise
