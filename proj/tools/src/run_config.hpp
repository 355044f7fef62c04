#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/microwave_network.hpp"
#include "kerrtwpa/noise.hpp"
#include "kerrtwpa/snail_cell.hpp"

namespace kerrtwpa::cli {

/// Uniform frequency grid, SI.
struct Grid {
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::size_t points = 0;

  [[nodiscard]] std::vector<double> values() const;
};

/// Pump frequencies plus exactly one strength specification.
struct PumpConfig {
  std::vector<double> omegas;
  std::optional<double> power_dbm;
  std::optional<double> amplitude;       // a_p0, rad
  std::optional<double> phase_per_cell;  // k_p a_p0, rad
};

struct CellSweepConfig {
  std::size_t points = 201;
};

struct DispersionConfig {
  double phi_ext = constants::pi;
  Grid grid;
  double theta0 = 0.0;
};

enum class GainReference { absolute, pump_off };

struct GainConfig {
  double phi_ext = constants::pi;
  PumpConfig pump;
  Grid grid;
  std::optional<std::filesystem::path> loss_profile;
  GainReference reference = GainReference::absolute;
};

struct PhaseMatchConfig {
  double phi_ext = constants::pi;
  PumpConfig pump;
};

struct NoiseSimConfig {
  double phi_ext = constants::pi;
  PumpConfig pump;
  Grid grid;
  std::optional<std::filesystem::path> loss_profile;
  /// Loss seen by the pump; defaults to loss_profile.
  std::optional<std::filesystem::path> pump_loss_profile;
};

struct SyntheticRadiometer {
  std::vector<double> omegas;
  std::vector<double> output_line_temperatures;  // K
  std::vector<double> twpa_temperatures;         // K
  double g_out_db = 0.0;
  double n_out_photons = 0.0;
  double g_twpa_db = 0.0;
  double n_twpa_photons = 0.0;
  noise::ModelKind model = noise::ModelKind::two_mode;
  double noise_fraction = 0.0;
};

struct NoiseFitConfig {
  double omega_p = 0.0;
  std::vector<noise::ModelKind> models;
  std::optional<std::filesystem::path> output_line_data;
  std::optional<std::filesystem::path> twpa_data;
  std::optional<std::filesystem::path> idler_gain_data;
  std::optional<SyntheticRadiometer> synthetic;
};

struct ImpedanceConfig {
  LadderSpec ladder;
  Grid grid;
  double z0 = 50.0;
};

struct RippleConfig {
  double gain_db = 20.0;
  double z0 = 50.0;
  double z_min = 40.0;
  double z_max = 60.0;
  std::size_t points = 81;
};

struct TransientRunConfig {
  std::optional<double> phi_ext;  // absent: |g3|-maximal flux
  std::vector<bool> polarity;     // runs to perform
  double probe_freq = 4e9;
  double probe_power_dbm = -90.0;
  double dt = 0.0;                // 0: default
  double duration = 25e-9;
  double ring_up = 8e-9;
  double ramp = 2e-9;
  std::size_t decimation = 10;
  double source_impedance = 50.0;
  double load_impedance = 50.0;
};

struct FitPhaseConfig {
  std::filesystem::path data;
};

struct FitFluxConfig {
  std::filesystem::path data;
};

struct RunConfig {
  std::filesystem::path source_path;
  /// Config text after overrides were applied; hashed into the manifest.
  std::string canonical_text;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  SnailParameters device;

  std::optional<CellSweepConfig> cell_sweep;
  std::optional<DispersionConfig> dispersion;
  std::optional<GainConfig> gain;
  std::optional<PhaseMatchConfig> phase_match;
  std::optional<NoiseSimConfig> noise_sim;
  std::optional<NoiseFitConfig> noise_fit;
  std::optional<ImpedanceConfig> impedance;
  std::optional<RippleConfig> ripple;
  std::optional<TransientRunConfig> transient;
  std::optional<FitPhaseConfig> fit_phase;
  std::optional<FitFluxConfig> fit_flux;
};

/// Parses a run file. Overrides are `dotted.key=value` with a YAML scalar or
/// flow value; they are applied before validation. Relative data paths are
/// resolved against the run file's directory. Unknown keys, missing
/// required keys and out-of-range values raise ConfigError naming the field.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::vector<std::string>& overrides = {});

}  // namespace kerrtwpa::cli
