#include "kerrtwpa/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa {

namespace {

constexpr std::size_t kMinSamples = 4096;

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

std::vector<double> make_window(Window kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == Window::rectangular) return w;
  constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = constants::two_pi * static_cast<double>(i) / static_cast<double>(n);
    w[i] = a0 - a1 * std::cos(x) + a2 * std::cos(2.0 * x) - a3 * std::cos(3.0 * x);
  }
  return w;
}

Spectrum spectrum(const std::vector<double>& series, double sample_rate, Window window) {
  const std::size_t n = series.size();
  if (n < kMinSamples) {
    throw ConfigError("spectrum needs at least 4096 samples, got " + std::to_string(n));
  }
  if (!(sample_rate > 0.0)) throw ConfigError("spectrum needs a positive sample rate");

  const auto w = make_window(window, n);
  double coherent_gain = 0.0;
  for (const double v : w) coherent_gain += v;
  coherent_gain /= static_cast<double>(n);

  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = series[i] * w[i];
  const std::size_t n_out = n / 2 + 1;
  std::vector<std::complex<double>> out(n_out);

  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE));
  }
  if (!plan) throw SolverError("FFTW could not create a plan", 0.0);
  fftw_execute(plan.get());

  Spectrum s;
  s.sample_rate = sample_rate;
  s.bin_width = sample_rate / static_cast<double>(n);
  s.bins.resize(n_out);
  s.power.resize(n_out);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n) *
                             coherent_gain * coherent_gain);
  for (std::size_t k = 0; k < n_out; ++k) {
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    const double p = (edge ? 1.0 : 2.0) * std::norm(out[k]) * norm;
    s.power[k] = p;
    s.bins[k].freq_hz = static_cast<double>(k) * s.bin_width;
    s.bins[k].power_db = p > 0.0 ? 10.0 * std::log10(p) : -400.0;
  }
  return s;
}

const char* fft_backend_version() { return fftw_version; }

double peak_power_db(const Spectrum& s, double freq_hz) {
  const auto last = static_cast<long>(s.bins.size()) - 1;
  const long centre = std::lround(freq_hz / s.bin_width);
  if (centre < 0 || centre > last) {
    throw ConfigError("frequency " + std::to_string(freq_hz * 1e-9) +
                      " GHz is outside the spectrum");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (long k = std::max(0L, centre - 2); k <= std::min(last, centre + 2); ++k) {
    best = std::max(best, s.bins[static_cast<std::size_t>(k)].power_db);
  }
  return best;
}

double second_harmonic_ratio(const Spectrum& s, double probe_freq_hz) {
  if (2.0 * probe_freq_hz > 0.5 * s.sample_rate) {
    throw ConfigError("second harmonic of " + std::to_string(probe_freq_hz * 1e-9) +
                      " GHz lies above Nyquist");
  }
  return peak_power_db(s, 2.0 * probe_freq_hz) - peak_power_db(s, probe_freq_hz);
}

}  // namespace kerrtwpa
