#include "kerrtwpa/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa::noise {

namespace {

std::string ghz(double omega) {
  std::ostringstream os;
  os << units::rad_per_s_to_ghz(omega) << " GHz";
  return os.str();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double var_slope = 0.0;
  double var_intercept = 0.0;
  double cov = 0.0;
};

// Ordinary least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::string& where) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx) * n)) {
    throw DataError("fit-degenerate design at " + where + ": source occupations do not vary");
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    rss += r * r;
  }
  const double sigma2 = x.size() > 2 ? rss / (n - 2.0) : 0.0;
  f.var_slope = sigma2 / sxx;
  f.var_intercept = sigma2 * (1.0 / n + mx * mx / sxx);
  f.cov = -sigma2 * mx / sxx;
  return f;
}

// Ratio b/a and its delta-method standard error.
std::pair<double, double> ratio_with_error(const LineFit& f) {
  const double a = f.slope, b = f.intercept;
  const double value = b / a;
  const double var = f.var_intercept / (a * a) + b * b * f.var_slope / (a * a * a * a) -
                     2.0 * b * f.cov / (a * a * a);
  return {value, std::sqrt(std::max(var, 0.0))};
}

std::map<double, std::vector<RadiometerSample>> group_by_frequency(
    const std::vector<RadiometerSample>& samples) {
  std::map<double, std::vector<RadiometerSample>> groups;
  for (const auto& s : samples) {
    if (!(s.t_source > 0.0) || !(s.psd_watts > 0.0) || !(s.b_w > 0.0)) {
      throw DataError("radiometer sample at " + ghz(s.omega) +
                      " needs positive temperature, power and bandwidth");
    }
    groups[s.omega].push_back(s);
  }
  return groups;
}

}  // namespace

double source_occupation(double omega, double t) {
  if (!(omega > 0.0)) throw ConfigError("source occupation needs omega > 0");
  if (!(t > 0.0)) throw ConfigError("source occupation needs temperature > 0");
  const double quantum = constants::hbar * omega / 2.0;
  const double x = quantum / (constants::boltzmann * t);
  return quantum / std::tanh(x);
}

double to_photons(double omega, double energy_density) {
  return energy_density / (constants::hbar * omega);
}

double from_photons(double omega, double photons) { return photons * constants::hbar * omega; }

double photons_to_kelvin(double omega, double photons) {
  return constants::hbar * omega * photons / constants::boltzmann;
}

const char* to_string(ModelKind kind) {
  return kind == ModelKind::single_mode ? "single-mode" : "two-mode";
}

std::vector<OutputLineRecord> fit_output_line(const std::vector<RadiometerSample>& samples) {
  std::vector<OutputLineRecord> out;
  for (const auto& [omega, group] : group_by_frequency(samples)) {
    const std::string where = ghz(omega);
    if (group.size() < 3) {
      throw DataError("output-line fit at " + where + " needs at least 3 temperatures");
    }
    std::vector<double> x, y;
    for (const auto& s : group) {
      x.push_back(to_photons(omega, source_occupation(omega, s.t_source)));
      y.push_back(to_photons(omega, s.psd_watts / s.b_w));
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi < 2.0 * *lo) {
      throw DataError("output-line fit at " + where +
                      ": source occupation must span a factor of 2");
    }
    const auto f = fit_line(x, y, where);
    const auto [n_out, n_out_se] = ratio_with_error(f);
    out.push_back({omega, f.slope, std::sqrt(f.var_slope), n_out, n_out_se});
  }
  return out;
}

NoiseFit fit_twpa_noise(const std::vector<RadiometerSample>& samples,
                        const std::vector<OutputLineRecord>& out_calibration,
                        const TwpaFitOptions& options) {
  std::vector<RadiometerSample> kept;
  for (const auto& s : samples) {
    if (s.t_source <= kMaxFitTemperature) kept.push_back(s);
  }
  NoiseFit fit;
  for (const auto& [omega, group] : group_by_frequency(kept)) {
    const std::string where = ghz(omega);
    const auto cal = std::find_if(out_calibration.begin(), out_calibration.end(),
                                  [&](const OutputLineRecord& r) {
                                    return std::abs(r.omega - omega) <= 1e-9 * omega;
                                  });
    if (cal == out_calibration.end()) {
      throw DataError("no output-line calibration at " + where);
    }
    const bool two_mode = options.model == ModelKind::two_mode;
    const double omega_i = 2.0 * options.omega_p - omega;
    if (two_mode && !(omega_i > 0.0)) {
      throw ConfigError("two-mode fit at " + where + " needs a pump frequency above half the signal");
    }
    double idler_gain = 0.0;
    if (two_mode && options.idler_gain == IdlerGain::measured) {
      const auto it = std::find_if(
          options.measured_idler_gain.begin(), options.measured_idler_gain.end(),
          [&](const auto& p) { return std::abs(p.first - omega) <= 1e-9 * omega; });
      if (it == options.measured_idler_gain.end()) {
        throw DataError("no measured idler gain at " + where);
      }
      idler_gain = it->second;
    }

    std::vector<double> temps;
    std::vector<double> x, y;
    for (const auto& s : group) {
      temps.push_back(s.t_source);
      const double xs = to_photons(omega, source_occupation(omega, s.t_source));
      const double yv = to_photons(omega, s.psd_watts / (s.b_w * cal->g_out)) - cal->n_out;
      if (!two_mode) {
        x.push_back(xs);
        y.push_back(yv);
        continue;
      }
      // Idler-band energy is referred to signal photons.
      const double xi = to_photons(omega, source_occupation(omega_i, s.t_source));
      if (options.idler_gain == IdlerGain::tied) {
        x.push_back(xs + xi);
        y.push_back(yv + xi);
      } else {
        x.push_back(xs);
        y.push_back(yv - idler_gain * xi);
      }
    }
    std::sort(temps.begin(), temps.end());
    const auto distinct = std::unique(temps.begin(), temps.end()) - temps.begin();
    if (distinct < 3) {
      throw DataError("TWPA noise fit at " + where +
                      " needs at least 3 distinct source temperatures at or below 400 mK");
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi < 1.1 * *lo) {
      throw DataError("TWPA noise fit at " + where + ": insufficient temperature spread");
    }
    const auto f = fit_line(x, y, where);
    const auto [n_twpa, n_twpa_se] = ratio_with_error(f);
    NoiseRecord rec;
    rec.omega = omega;
    rec.g_out = cal->g_out;
    rec.n_out = cal->n_out;
    rec.g_twpa = f.slope;
    rec.g_twpa_se = std::sqrt(f.var_slope);
    rec.n_twpa = n_twpa;
    rec.n_twpa_se = n_twpa_se;
    rec.model = options.model;
    fit.records.push_back(rec);
  }
  return fit;
}

double radiometer_power(const SyntheticTruth& truth, double t_source) {
  const double w = truth.omega;
  const double ns = source_occupation(w, t_source);
  const double n_out = from_photons(w, truth.n_out);
  double referred = ns + n_out;
  if (truth.g_twpa) {
    const double g = *truth.g_twpa;
    referred = ns * g + from_photons(w, truth.n_twpa) * g + n_out;
    if (truth.model == ModelKind::two_mode) {
      const double omega_i = 2.0 * truth.omega_p - w;
      if (!(omega_i > 0.0)) throw ConfigError("synthetic two-mode truth needs omega_p > omega/2");
      const double gi = truth.g_idler.value_or(g - 1.0);
      referred += source_occupation(omega_i, t_source) * gi;
    }
  }
  return referred * truth.g_out * truth.b_w;
}

std::vector<RadiometerSample> synthesize_radiometer(const std::vector<SyntheticTruth>& truths,
                                                    const std::vector<double>& temperatures,
                                                    std::uint64_t seed, double noise_fraction) {
  if (temperatures.empty()) throw ConfigError("synthesize_radiometer needs temperatures");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<RadiometerSample> out;
  out.reserve(truths.size() * temperatures.size());
  for (const auto& truth : truths) {
    for (const double t : temperatures) {
      double p = radiometer_power(truth, t);
      if (noise_fraction != 0.0) p *= 1.0 + noise_fraction * normal(rng);
      out.push_back({truth.omega, t, p, truth.b_w});
    }
  }
  return out;
}

AddedNoise simulate_added_noise(const CoupledModeSystem& system, double omega_s) {
  const auto& in = system.inputs();
  const Matrix2c step = expm(system.lossless().flux_generator()).value;
  Matrix2c transmission = Matrix2c::Zero();
  transmission(0, 0) = std::exp(-in.kappa2_s);
  transmission(1, 1) = std::exp(-in.kappa2_i);
  const Matrix2c cell = transmission * step;
  const double w_s = -std::expm1(-2.0 * in.kappa2_s);
  const double w_i = -std::expm1(-2.0 * in.kappa2_i);

  // s holds cell^j: the bath injected after cell N - j still crosses j cells.
  Matrix2c s = Matrix2c::Identity();
  double bath = 0.0;
  double bath_commutator = 0.0;
  for (std::size_t j = 0; j < system.n_cells(); ++j) {
    const double t11 = std::norm(s(0, 0));
    const double t12 = std::norm(s(0, 1));
    bath += 0.5 * (t11 * w_s + t12 * w_i);
    bath_commutator += t11 * w_s - t12 * w_i;
    s = cell * s;
  }

  AddedNoise out;
  out.omega_s = omega_s;
  out.gain = std::norm(s(0, 0));
  const double idler = std::norm(s(0, 1));
  out.output_photons = 0.5 * out.gain + 0.5 * idler + bath;
  out.commutator = out.gain - idler + bath_commutator;
  if (!(out.gain > 1.0)) {
    throw ModelValidityError("added noise is undefined without gain (G = " +
                             std::to_string(out.gain) + " at " + ghz(omega_s) + ")");
  }
  const double excess = out.output_photons - 0.5 * out.gain;
  out.added_photons = excess / (out.gain - 1.0);
  out.added_photons_per_gain = excess / out.gain;
  return out;
}

AddedNoise simulate_added_noise(const OperatingPoint& op, const PumpDrive& pump,
                                const LossProfile& loss, double omega_s, std::size_t n_cells,
                                const LossProfile* pump_loss) {
  const LossProfile* for_pump = pump_loss ? pump_loss : &loss;
  check_pump_validity(op, pump, for_pump, n_cells);
  return simulate_added_noise(
      CoupledModeSystem::build(op, omega_s, pump, &loss, for_pump, n_cells), omega_s);
}

}  // namespace kerrtwpa::noise
