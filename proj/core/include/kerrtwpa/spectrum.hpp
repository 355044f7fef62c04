#pragma once

#include <vector>

namespace kerrtwpa {

enum class Window { rectangular, blackman_harris };

/// Coefficients of the 4-term Blackman-Harris window (periodic form).
std::vector<double> make_window(Window kind, std::size_t n);

struct SpectrumBin {
  double freq_hz = 0.0;
  double power_db = 0.0;  // 10 log10 of mean-square units
};

struct Spectrum {
  std::vector<SpectrumBin> bins;  // 0 .. n/2 inclusive
  double sample_rate = 0.0;
  double bin_width = 0.0;
  /// Linear single-sided powers parallel to `bins`.
  std::vector<double> power;
};

/// Single-sided periodogram. Each bin is scaled by the window's coherent
/// gain so a sinusoid of amplitude A centred on a bin reports A^2/2. With
/// the rectangular window the bin powers sum to the mean square of the
/// series. Needs at least 4096 samples.
Spectrum spectrum(const std::vector<double>& series, double sample_rate,
                  Window window = Window::blackman_harris);

/// power(2f) - power(f) in dB, each taken as the largest bin within two
/// bins of the nominal frequency. ConfigError when 2f exceeds Nyquist.
double second_harmonic_ratio(const Spectrum& s, double probe_freq_hz);

/// Version string of the FFT library in use.
const char* fft_backend_version();

/// Largest bin power within +-2 bins of `freq_hz`, in dB.
double peak_power_db(const Spectrum& s, double freq_hz);

}  // namespace kerrtwpa
