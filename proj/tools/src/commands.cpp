#include "commands.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "kerrtwpa/calibration_fit.hpp"
#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/coupled_mode.hpp"
#include "kerrtwpa/csv.hpp"
#include "kerrtwpa/dispersion.hpp"
#include "kerrtwpa/errors.hpp"
#include "kerrtwpa/microwave_network.hpp"
#include "kerrtwpa/noise.hpp"
#include "kerrtwpa/spectrum.hpp"
#include "kerrtwpa/transient_lattice.hpp"

#ifndef KERRTWPA_VERSION
#define KERRTWPA_VERSION "unknown"
#endif

namespace kerrtwpa::cli {

namespace {

namespace fs = std::filesystem;
using csv::format_number;

// Reported frequencies are rounded to 1 Hz so grid points read back as typed.
double ghz(double omega) { return std::round(units::rad_per_s_to_ghz(omega) * 1e9) / 1e9; }
double mhz(double omega) { return omega / constants::two_pi * 1e-6; }

template <typename Block>
const Block& need(const std::optional<Block>& block, const char* name) {
  if (!block) throw ConfigError(std::string("run file has no '") + name + "' block");
  return *block;
}

std::string suffix_ghz(double omega) { return format_number(ghz(omega)) + "ghz"; }

PumpDrive resolve_pump(const OperatingPoint& op, const PumpConfig& cfg, double omega_p) {
  if (cfg.power_dbm) return PumpDrive::from_power(op, omega_p, *cfg.power_dbm);
  if (cfg.amplitude) return PumpDrive::from_amplitude(omega_p, *cfg.amplitude);
  return PumpDrive::from_amplitude(omega_p, *cfg.phase_per_cell / wavevector(op, omega_p));
}

LossProfile load_loss(const std::optional<fs::path>& path, CommandOutput& out) {
  if (!path) return LossProfile::lossless(1e-3, 1e4);
  out.inputs.push_back(*path);
  return LossProfile::from_csv(*path);
}

Json pump_json(const OperatingPoint& op, const PumpDrive& pump) {
  Json j;
  j["freq_ghz"] = ghz(pump.omega_p);
  j["amplitude_rad"] = pump.a_p0;
  j["phase_per_cell_rad"] = wavevector(op, pump.omega_p) * pump.a_p0;
  if (pump.input_power_dbm) j["power_dbm"] = *pump.input_power_dbm;
  return j;
}

CommandOutput cell_sweep(const RunConfig& cfg) {
  const auto& c = need(cfg.cell_sweep, "cell_sweep");
  CommandOutput out;
  std::vector<std::vector<double>> rows;
  for (const auto& op : flux_sweep(cfg.device, c.points)) {
    rows.push_back({op.phi_ext / constants::two_pi, op.phi_star, op.alpha, op.beta, op.gamma,
                    op.l_cell * 1e12, ghz(op.omega_j), mhz(op.g3), mhz(op.g4)});
  }
  out.files.push_back({"cell_sweep.csv",
                       csv::render({"flux_quanta", "phi_star_rad", "alpha", "beta", "gamma", "l_ph",
                                    "f_j_ghz", "g3_mhz", "g4_mhz"},
                                   rows)});
  const double best = flux_of_max_g3(cfg.device);
  out.results["flux_of_max_abs_g3_quanta"] = best / constants::two_pi;
  out.results["f_j_zero_flux_ghz"] = ghz(operating_point(cfg.device, 0.0).omega_j);
  out.results["f_j_half_flux_ghz"] = ghz(operating_point(cfg.device, constants::pi).omega_j);
  return out;
}

CommandOutput dispersion(const RunConfig& cfg) {
  const auto& c = need(cfg.dispersion, "dispersion");
  CommandOutput out;
  const auto op = operating_point(cfg.device, c.phi_ext);
  std::vector<std::vector<double>> rows;
  for (const double omega : c.grid.values()) {
    rows.push_back({ghz(omega), wavevector(op, omega),
                    transmitted_phase(op, cfg.device.n_cells, c.theta0, omega)});
  }
  out.files.push_back(
      {"dispersion.csv", csv::render({"freq_ghz", "k_rad_per_cell", "theta_rad"}, rows)});
  out.results["l_cell_ph"] = op.l_cell * 1e12;
  out.results["f_j_ghz"] = ghz(op.omega_j);
  return out;
}

CommandOutput gain(const RunConfig& cfg) {
  const auto& c = need(cfg.gain, "gain");
  CommandOutput out;
  const auto op = operating_point(cfg.device, c.phi_ext);
  const auto loss = load_loss(c.loss_profile, out);
  const auto grid = c.grid.values();
  out.results["gain_reference"] = c.reference == GainReference::absolute ? "absolute" : "pump_off";
  Json pumps = Json::array();
  for (const double omega_p : c.pump.omegas) {
    const auto pump = resolve_pump(op, c.pump, omega_p);
    const auto profile = gain_profile(op, pump, loss, grid, cfg.device.n_cells);
    std::vector<std::vector<double>> rows;
    double peak = -std::numeric_limits<double>::infinity();
    double peak_f = 0.0;
    for (const auto& pt : profile.points) {
      const double g = c.reference == GainReference::absolute ? pt.gain_db : pt.net_gain_db;
      rows.push_back({ghz(pt.omega_s), g, pt.delta_k_out});
      if (g > peak) {
        peak = g;
        peak_f = ghz(pt.omega_s);
      }
    }
    const std::string name = "gain_fp" + suffix_ghz(omega_p) + ".csv";
    out.files.push_back({name, csv::render({"f_signal_ghz", "gain_db", "delta_k_out_rad"}, rows)});
    for (const auto& d : profile.diagnostics) out.diagnostics.push_back(d);
    Json j = pump_json(op, pump);
    j["file"] = name;
    j["attenuated_phase_per_cell_rad"] = profile.pump_phase_drop;
    j["pump_warning"] = profile.pump_warning;
    if (!profile.points.empty()) {
      j["peak_gain_db"] = peak;
      j["peak_freq_ghz"] = peak_f;
    }
    if (profile.pump_warning) {
      out.diagnostics.push_back("pump at " + format_number(ghz(omega_p)) +
                                " GHz: per-cell phase drop above the warning level");
    }
    pumps.push_back(j);
  }
  out.results["pumps"] = pumps;
  return out;
}

CommandOutput phase_match(const RunConfig& cfg) {
  const auto& c = need(cfg.phase_match, "phase_match");
  CommandOutput out;
  const auto op = operating_point(cfg.device, c.phi_ext);
  std::vector<std::vector<double>> rows;
  Json pumps = Json::array();
  for (const double omega_p : c.pump.omegas) {
    const auto pump = resolve_pump(op, c.pump, omega_p);
    const auto roots = phase_matched_frequencies(op, pump);
    for (const double w : roots) rows.push_back({ghz(omega_p), ghz(w), ghz(2.0 * omega_p - w)});
    Json j = pump_json(op, pump);
    j["roots"] = roots.size();
    pumps.push_back(j);
  }
  out.files.push_back(
      {"phase_match.csv", csv::render({"pump_ghz", "f_signal_ghz", "f_idler_ghz"}, rows)});
  out.results["pumps"] = pumps;
  return out;
}

CommandOutput noise_sim(const RunConfig& cfg) {
  const auto& c = need(cfg.noise_sim, "noise_sim");
  CommandOutput out;
  const auto op = operating_point(cfg.device, c.phi_ext);
  const auto loss = load_loss(c.loss_profile, out);
  std::optional<LossProfile> pump_loss;
  if (c.pump_loss_profile) pump_loss = load_loss(c.pump_loss_profile, out);
  const LossProfile* for_pump = pump_loss ? &*pump_loss : &loss;
  Json pumps = Json::array();
  for (const double omega_p : c.pump.omegas) {
    const auto pump = resolve_pump(op, c.pump, omega_p);
    check_pump_validity(op, pump, for_pump, cfg.device.n_cells);
    std::vector<std::vector<double>> rows;
    double best_net = -std::numeric_limits<double>::infinity(), noise_at_best = 0.0, f_best = 0.0;
    for (const double omega_s : c.grid.values()) {
      try {
        const auto r = noise::simulate_added_noise(op, pump, loss, omega_s, cfg.device.n_cells, for_pump);
        const double gain_db = units::power_ratio_to_db(r.gain);
        // Pump-off transmission of the signal is exp(-kappa2 N) in amplitude.
        const double net_db = gain_db + 20.0 * kappa_from_loss(loss, cfg.device.n_cells, omega_s) *
                                            static_cast<double>(cfg.device.n_cells) /
                                            std::numbers::ln10;
        rows.push_back({ghz(omega_s), gain_db, net_db, r.added_photons, r.commutator});
        if (net_db > best_net) {
          best_net = net_db;
          noise_at_best = r.added_photons;
          f_best = ghz(omega_s);
        }
      } catch (const ModelValidityError& e) {
        out.diagnostics.push_back("skipped " + format_number(ghz(omega_s)) + " GHz: " + e.what());
      } catch (const DataError& e) {
        out.diagnostics.push_back("skipped " + format_number(ghz(omega_s)) + " GHz: " + e.what());
      }
    }
    const std::string name = "noise_sim_fp" + suffix_ghz(omega_p) + ".csv";
    out.files.push_back({name, csv::render({"f_signal_ghz", "gain_db", "net_gain_db",
                                            "n_added_photons", "commutator"},
                                           rows)});
    Json j = pump_json(op, pump);
    j["file"] = name;
    if (!rows.empty()) {
      j["peak_net_gain_db"] = best_net;
      j["peak_freq_ghz"] = f_best;
      j["added_photons_at_peak"] = noise_at_best;
    }
    pumps.push_back(j);
  }
  out.results["pumps"] = pumps;
  return out;
}

const std::vector<std::string> kRadiometerHeader = {"freq_ghz", "t_source_mk", "psd_dbm_per_hz"};

std::vector<noise::RadiometerSample> parse_radiometer(const csv::Table& t) {
  std::vector<noise::RadiometerSample> out;
  for (const auto& row : t.rows) {
    out.push_back({units::ghz_to_rad_per_s(row[0]), row[1] * 1e-3, units::dbm_to_watts(row[2]), 1.0});
  }
  return out;
}

std::string render_radiometer(const std::vector<noise::RadiometerSample>& samples) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : samples) {
    rows.push_back({ghz(s.omega), s.t_source * 1e3, units::watts_to_dbm(s.psd_watts / s.b_w)});
  }
  return csv::render(kRadiometerHeader, rows);
}

const char* model_name(noise::ModelKind m) {
  return m == noise::ModelKind::two_mode ? "two_mode" : "single_mode";
}

CommandOutput noise_fit(const RunConfig& cfg) {
  const auto& c = need(cfg.noise_fit, "noise_fit");
  CommandOutput out;
  std::vector<noise::RadiometerSample> line, twpa;
  if (c.synthetic) {
    const auto& s = *c.synthetic;
    std::vector<noise::SyntheticTruth> line_truth, twpa_truth;
    for (const double w : s.omegas) {
      noise::SyntheticTruth t;
      t.omega = w;
      t.omega_p = c.omega_p;
      t.g_out = units::db_to_power_ratio(s.g_out_db);
      t.n_out = s.n_out_photons;
      line_truth.push_back(t);
      t.g_twpa = units::db_to_power_ratio(s.g_twpa_db);
      t.n_twpa = s.n_twpa_photons;
      t.model = s.model;
      twpa_truth.push_back(t);
    }
    const auto line_text = render_radiometer(
        noise::synthesize_radiometer(line_truth, s.output_line_temperatures, cfg.seed, s.noise_fraction));
    const auto twpa_text = render_radiometer(
        noise::synthesize_radiometer(twpa_truth, s.twpa_temperatures, cfg.seed + 1, s.noise_fraction));
    out.seeds["output_line"] = cfg.seed;
    out.seeds["twpa"] = cfg.seed + 1;
    // Fit exactly what is written out.
    line = parse_radiometer(csv::parse(line_text, kRadiometerHeader, "radiometer_output_line.csv"));
    twpa = parse_radiometer(csv::parse(twpa_text, kRadiometerHeader, "radiometer_twpa.csv"));
    out.files.push_back({"radiometer_output_line.csv", line_text});
    out.files.push_back({"radiometer_twpa.csv", twpa_text});
  } else {
    out.inputs.push_back(*c.output_line_data);
    out.inputs.push_back(*c.twpa_data);
    line = parse_radiometer(csv::read_file(*c.output_line_data, kRadiometerHeader));
    twpa = parse_radiometer(csv::read_file(*c.twpa_data, kRadiometerHeader));
  }
  const auto calibration = noise::fit_output_line(line);

  noise::TwpaFitOptions options;
  options.omega_p = c.omega_p;
  if (c.idler_gain_data) {
    out.inputs.push_back(*c.idler_gain_data);
    const auto t = csv::read_file(*c.idler_gain_data, {"freq_ghz", "gain_db"});
    options.idler_gain = noise::IdlerGain::measured;
    for (const auto& row : t.rows) {
      options.measured_idler_gain.emplace_back(units::ghz_to_rad_per_s(row[0]),
                                               units::db_to_power_ratio(row[1]));
    }
  }

  std::ostringstream report;
  report << "freq_ghz,g_out_db,n_out_photons,g_twpa_db,n_twpa_photons,model\n";
  Json fits = Json::array();
  std::map<double, std::map<std::string, double>> by_freq;
  for (const auto model : c.models) {
    options.model = model;
    for (const auto& r : noise::fit_twpa_noise(twpa, calibration, options).records) {
      report << format_number(ghz(r.omega)) << ',' << format_number(units::power_ratio_to_db(r.g_out))
             << ',' << format_number(r.n_out) << ','
             << format_number(units::power_ratio_to_db(r.g_twpa)) << ',' << format_number(r.n_twpa)
             << ',' << model_name(model) << '\n';
      Json j;
      j["freq_ghz"] = ghz(r.omega);
      j["model"] = model_name(model);
      j["n_twpa_photons"] = r.n_twpa;
      j["n_twpa_photons_se"] = r.n_twpa_se;
      j["t_twpa_mk"] = noise::photons_to_kelvin(r.omega, r.n_twpa) * 1e3;
      j["g_twpa_db"] = units::power_ratio_to_db(r.g_twpa);
      fits.push_back(j);
      by_freq[ghz(r.omega)][model_name(model)] = r.n_twpa;
    }
  }
  out.files.push_back({"noise_fit.csv", report.str()});
  out.results["fits"] = fits;
  Json ratios = Json::array();
  for (const auto& [f, m] : by_freq) {
    if (m.count("two_mode") && m.count("single_mode") && m.at("single_mode") != 0.0) {
      ratios.push_back({{"freq_ghz", f}, {"two_over_single", m.at("two_mode") / m.at("single_mode")}});
    }
  }
  if (!ratios.empty()) out.results["two_mode_over_single_mode"] = ratios;
  return out;
}

CommandOutput impedance(const RunConfig& cfg) {
  const auto& c = need(cfg.impedance, "impedance");
  CommandOutput out;
  const auto grid = c.grid.values();
  const auto z = characteristic_impedance(c.ladder, grid);
  const auto s21 = transmission(c.ladder, c.z0, grid);
  std::vector<std::vector<double>> rows;
  std::size_t stop = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rows.push_back({ghz(grid[i]), z[i].z.real(), z[i].z.imag(), 20.0 * std::log10(std::abs(s21[i]))});
    stop += z[i].stop_band ? 1 : 0;
  }
  out.files.push_back(
      {"impedance.csv", csv::render({"freq_ghz", "re_z_ohm", "im_z_ohm", "s21_db"}, rows)});
  out.results["sqrt_l_over_c_ohm"] = std::sqrt(c.ladder.l_cell / c.ladder.c_cell);
  out.results["stop_band_points"] = stop;
  out.results["cutoff_ghz"] = ghz(c.ladder.cutoff());
  return out;
}

CommandOutput ripple(const RunConfig& cfg) {
  const auto& c = need(cfg.ripple, "ripple");
  CommandOutput out;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < c.points; ++i) {
    const double z = c.z_min + (c.z_max - c.z_min) * static_cast<double>(i) /
                                   static_cast<double>(c.points - 1);
    const double g = reflection_coefficient(z, c.z0);
    rows.push_back({z, g, ripple_peak_to_peak(c.gain_db, g, g)});
  }
  out.files.push_back({"ripple.csv", csv::render({"z_twpa_ohm", "gamma", "ripple_db"}, rows)});
  out.results["gain_db"] = c.gain_db;
  return out;
}

CommandOutput transient(const RunConfig& cfg) {
  const auto& c = need(cfg.transient, "transient");
  CommandOutput out;
  const double phi_ext = c.phi_ext ? *c.phi_ext : flux_of_max_g3(cfg.device);
  out.results["flux_quanta"] = phi_ext / constants::two_pi;
  Json runs = Json::array();
  std::map<bool, double> ratio;
  for (const bool polarity : c.polarity) {
    const auto lattice = build_lattice(cfg.device, phi_ext, polarity);
    TransientConfig tc;
    tc.dt = c.dt;
    tc.duration = c.duration;
    tc.ring_up = c.ring_up;
    tc.ramp = c.ramp;
    tc.probe_freq = c.probe_freq;
    tc.probe_power_dbm = c.probe_power_dbm;
    tc.record_decimation = c.decimation;
    tc.source_impedance = c.source_impedance;
    tc.load_impedance = c.load_impedance;
    const auto res = integrate(lattice, tc);
    const auto spec = spectrum(res.v_out, res.sample_rate);
    const std::string tag = polarity ? "on" : "off";

    std::vector<std::vector<double>> series;
    series.reserve(res.v_out.size());
    for (std::size_t i = 0; i < res.v_out.size(); ++i) {
      series.push_back({res.time[i] * 1e9, res.v_out[i] * 1e6});
    }
    std::vector<std::vector<double>> bins;
    for (const auto& b : spec.bins) bins.push_back({b.freq_hz * 1e-9, b.power_db});
    out.files.push_back({"transient_polarity_" + tag + "_series.csv",
                         csv::render({"t_ns", "v_out_uv"}, series)});
    out.files.push_back({"transient_polarity_" + tag + "_spectrum.csv",
                         csv::render({"freq_ghz", "power_db"}, bins)});
    ratio[polarity] = second_harmonic_ratio(spec, c.probe_freq);
    Json j;
    j["polarity"] = tag;
    j["dt_ps"] = res.dt * 1e12;
    j["samples"] = res.v_out.size();
    j["second_harmonic_ratio_db"] = ratio[polarity];
    j["peak_energy_ratio"] = res.peak_energy_ring_up > 0.0
                                 ? res.peak_energy_record / res.peak_energy_ring_up
                                 : 0.0;
    runs.push_back(j);
  }
  out.results["runs"] = runs;
  if (ratio.size() == 2) out.results["suppression_db"] = ratio[true] - ratio[false];
  return out;
}

Json fit_meta(const FitResult& f, std::size_t n) {
  Json j;
  j["converged"] = f.converged;
  j["reason"] = f.reason;
  j["iterations"] = f.iterations;
  j["evaluations"] = f.evaluations;
  j["residual_norm"] = f.residual_norm;
  j["data_points"] = n;
  return j;
}

Json param(double value, double se) { return Json{{"value", value}, {"stderr", se}}; }

CommandOutput fit_phase(const RunConfig& cfg) {
  const auto& c = need(cfg.fit_phase, "fit_phase");
  CommandOutput out;
  out.inputs.push_back(c.data);
  const auto t = csv::read_file(c.data, {"freq_ghz", "phase_rad"});
  std::vector<PhaseSample> data;
  for (const auto& row : t.rows) data.push_back({units::ghz_to_rad_per_s(row[0]), row[1]});
  const auto fit = fit_dispersion_phase(data, {cfg.device.n_cells, cfg.device.cg, cfg.device.cj});
  Json report;
  report["fit"] = "dispersion_phase";
  report["fixed"] = {{"n_cells", cfg.device.n_cells},
                     {"cg_ff", cfg.device.cg * 1e15},
                     {"cj_ff", cfg.device.cj * 1e15}};
  report["parameters"] = {{"l_cell_ph", param(fit.l_cell * 1e12, fit.l_cell_se * 1e12)},
                          {"theta0_rad", param(fit.theta0, fit.theta0_se)},
                          {"theta0_wrapped_rad", std::remainder(fit.theta0, constants::two_pi)}};
  report["convergence"] = fit_meta(fit.engine, data.size());
  out.files.push_back({"fit_phase.json", report.dump(2) + "\n"});
  out.results = report["parameters"];
  return out;
}

CommandOutput fit_flux(const RunConfig& cfg) {
  const auto& c = need(cfg.fit_flux, "fit_flux");
  CommandOutput out;
  out.inputs.push_back(c.data);
  const auto t = csv::read_file(c.data, {"flux_quanta", "l_ph"});
  std::vector<FluxSample> data;
  for (const auto& row : t.rows) data.push_back({constants::two_pi * row[0], row[1] * 1e-12});
  const auto fit = fit_flux_dependence(data);
  Json report;
  report["fit"] = "flux_dependence";
  report["parameters"] = {{"i0_ua", param(fit.i0 * 1e6, fit.i0_se * 1e6)},
                          {"r", param(fit.r, fit.r_se)}};
  report["convergence"] = fit_meta(fit.engine, data.size());
  out.files.push_back({"fit_flux.json", report.dump(2) + "\n"});
  out.results = report["parameters"];
  return out;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read input file '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << content;
  f.close();
  if (!f) throw DataError("cannot write '" + p.string() + "'");
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "cell-sweep", "dispersion", "gain",      "phase-match", "noise-sim", "noise-fit",
      "impedance",  "ripple",     "transient", "fit-phase",   "fit-flux"};
  return names;
}

CommandOutput run_command(const std::string& sub, const RunConfig& cfg) {
  if (sub == "cell-sweep") return cell_sweep(cfg);
  if (sub == "dispersion") return dispersion(cfg);
  if (sub == "gain") return gain(cfg);
  if (sub == "phase-match") return phase_match(cfg);
  if (sub == "noise-sim") return noise_sim(cfg);
  if (sub == "noise-fit") return noise_fit(cfg);
  if (sub == "impedance") return impedance(cfg);
  if (sub == "ripple") return ripple(cfg);
  if (sub == "transient") return transient(cfg);
  if (sub == "fit-phase") return fit_phase(cfg);
  if (sub == "fit-flux") return fit_flux(cfg);
  throw ConfigError("unknown subcommand '" + sub + "'");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

void write_outputs(const std::string& sub, const RunConfig& cfg, const CommandOutput& output,
                   const fs::path& dir) {
  Json manifest;
  manifest["tool"] = "kerrtwpa";
  manifest["version"] = KERRTWPA_VERSION;
  manifest["subcommand"] = sub;
  manifest["config"] = {{"path", cfg.source_path.string()},
                        {"sha256", sha256_hex(cfg.canonical_text)}};
  manifest["seed"] = cfg.seed;
  if (!output.seeds.empty()) manifest["seeds"] = output.seeds;
  Json inputs = Json::array();
  for (const auto& p : output.inputs) {
    inputs.push_back({{"path", p.string()}, {"sha256", sha256_hex(read_bytes(p))}});
  }
  manifest["inputs"] = inputs;
  Json files = Json::array();
  for (const auto& f : output.files) {
    files.push_back({{"file", f.name}, {"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}});
  }
  manifest["outputs"] = files;
  manifest["results"] = output.results;
  manifest["diagnostics"] = output.diagnostics;
  manifest["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                         std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                         std::to_string(EIGEN_MINOR_VERSION)},
                           {"fft", fft_backend_version()}};

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& f : output.files) {
      const fs::path final_path = dir / f.name;
      const fs::path tmp = dir / (f.name + ".partial");
      write_file(tmp, f.content);
      staged.emplace_back(tmp, final_path);
    }
    const fs::path tmp = dir / "manifest.json.partial";
    write_file(tmp, manifest.dump(2) + "\n");
    staged.emplace_back(tmp, dir / "manifest.json");
  } catch (...) {
    for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
    throw;
  }
  for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

}  // namespace kerrtwpa::cli
