#include "run_config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa::cli {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + join(where, key) + "'");
  }
}

template <typename T>
T convert(const YAML::Node& node, const std::string& field, const char* what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("field '" + field + "' must be " + what);
  }
}

double number(const YAML::Node& parent, const std::string& where, const std::string& key) {
  const auto node = parent[key];
  if (!node) throw ConfigError("missing required field '" + join(where, key) + "'");
  return convert<double>(node, join(where, key), "a number");
}

double number_or(const YAML::Node& parent, const std::string& where, const std::string& key,
                 double fallback) {
  return parent[key] ? number(parent, where, key) : fallback;
}

std::optional<double> optional_number(const YAML::Node& parent, const std::string& where,
                                      const std::string& key) {
  if (!parent[key]) return std::nullopt;
  return number(parent, where, key);
}

std::size_t count(const YAML::Node& parent, const std::string& where, const std::string& key,
                  std::optional<std::size_t> fallback = std::nullopt) {
  const auto node = parent[key];
  if (!node) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + join(where, key) + "'");
  }
  const auto v = convert<long long>(node, join(where, key), "an integer");
  if (v < 0) throw ConfigError("field '" + join(where, key) + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::string text(const YAML::Node& parent, const std::string& where, const std::string& key,
                 const std::string& fallback) {
  const auto node = parent[key];
  if (!node) return fallback;
  return convert<std::string>(node, join(where, key), "a string");
}

std::vector<double> numbers(const YAML::Node& parent, const std::string& where,
                            const std::string& key) {
  const auto node = parent[key];
  const auto field = join(where, key);
  if (!node) throw ConfigError("missing required field '" + field + "'");
  if (node.IsScalar()) return {convert<double>(node, field, "a number or list of numbers")};
  if (!node.IsSequence() || node.size() == 0) {
    throw ConfigError("field '" + field + "' must be a non-empty list of numbers");
  }
  std::vector<double> out;
  for (const auto& item : node) out.push_back(convert<double>(item, field, "a list of numbers"));
  return out;
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ConfigError("field '" + field + "' must be positive");
}

fs::path data_path(const YAML::Node& parent, const std::string& where, const std::string& key,
                   const fs::path& base) {
  const fs::path p = convert<std::string>(parent[key], join(where, key), "a path");
  return p.is_absolute() ? p : base / p;
}

double flux(const YAML::Node& block, const std::string& where) {
  return constants::two_pi * number_or(block, where, "flux_quanta", 0.5);
}

Grid parse_grid(const YAML::Node& block, const std::string& where) {
  const std::string at = join(where, "grid");
  const auto node = block["grid"];
  if (!node) throw ConfigError("missing required block '" + at + "'");
  check_keys(node, at, {"f_min_ghz", "f_max_ghz", "points"});
  Grid g;
  const double lo = number(node, at, "f_min_ghz");
  const double hi = number(node, at, "f_max_ghz");
  g.points = count(node, at, "points");
  require_positive(lo, join(at, "f_min_ghz"));
  if (!(hi >= lo)) throw ConfigError("field '" + join(at, "f_max_ghz") + "' must be >= f_min_ghz");
  if (g.points < 1 || (g.points == 1 && hi != lo)) {
    throw ConfigError("field '" + join(at, "points") + "' must be >= 2 for a non-empty range");
  }
  g.omega_min = units::ghz_to_rad_per_s(lo);
  g.omega_max = units::ghz_to_rad_per_s(hi);
  return g;
}

PumpConfig parse_pump(const YAML::Node& block, const std::string& where) {
  const std::string at = join(where, "pump");
  const auto node = block["pump"];
  if (!node) throw ConfigError("missing required block '" + at + "'");
  check_keys(node, at, {"freq_ghz", "power_dbm", "amplitude_rad", "phase_per_cell_rad"});
  PumpConfig p;
  for (const double f : numbers(node, at, "freq_ghz")) {
    require_positive(f, join(at, "freq_ghz"));
    p.omegas.push_back(units::ghz_to_rad_per_s(f));
  }
  p.power_dbm = optional_number(node, at, "power_dbm");
  p.amplitude = optional_number(node, at, "amplitude_rad");
  p.phase_per_cell = optional_number(node, at, "phase_per_cell_rad");
  const int given = int(p.power_dbm.has_value()) + int(p.amplitude.has_value()) +
                    int(p.phase_per_cell.has_value());
  if (given != 1) {
    throw ConfigError("'" + at + "' needs exactly one of power_dbm, amplitude_rad, phase_per_cell_rad");
  }
  if (p.amplitude && !(*p.amplitude >= 0.0)) {
    throw ConfigError("field '" + join(at, "amplitude_rad") + "' must be non-negative");
  }
  if (p.phase_per_cell && !(*p.phase_per_cell >= 0.0)) {
    throw ConfigError("field '" + join(at, "phase_per_cell_rad") + "' must be non-negative");
  }
  return p;
}

noise::ModelKind parse_model(const std::string& name, const std::string& field) {
  if (name == "two_mode") return noise::ModelKind::two_mode;
  if (name == "single_mode") return noise::ModelKind::single_mode;
  throw ConfigError("field '" + field + "' must be two_mode or single_mode, got '" + name + "'");
}

std::vector<double> kelvin_list(const YAML::Node& node, const std::string& where,
                                const std::string& key) {
  std::vector<double> out;
  for (const double mk : numbers(node, where, key)) {
    require_positive(mk, join(where, key));
    out.push_back(mk * 1e-3);
  }
  return out;
}

SnailParameters parse_device(const YAML::Node& node) {
  const std::string at = "device";
  if (!node) throw ConfigError("missing required block 'device'");
  check_keys(node, at, {"i0_ua", "r", "cg_ff", "cj_ff", "n_cells", "polarity"});
  const double i0 = number(node, at, "i0_ua") * 1e-6;
  const double r = number(node, at, "r");
  const double cg = number(node, at, "cg_ff") * 1e-15;
  const double cj = number(node, at, "cj_ff") * 1e-15;
  const std::size_t n = count(node, at, "n_cells");
  std::vector<int> polarity;
  const auto pol = node["polarity"];
  if (!pol || (pol.IsScalar() && pol.as<std::string>() == "alternating")) {
    polarity = SnailParameters::alternating_polarity(n);
  } else if (pol.IsScalar() && pol.as<std::string>() == "uniform") {
    polarity.assign(n, 1);
  } else if (pol.IsSequence()) {
    for (const auto& item : pol) polarity.push_back(convert<int>(item, "device.polarity", "a list of +1/-1"));
  } else {
    throw ConfigError("field 'device.polarity' must be alternating, uniform or a list of +1/-1");
  }
  return SnailParameters::make(i0, r, cg, cj, n, polarity);
}

void apply_override(YAML::Node& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + spec + "' must have the form key.path=value");
  }
  const std::string key = spec.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(spec.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + spec + "' has an unparsable value");
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
    parts.push_back(part);
  }
  YAML::Node cur = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (cur[parts[i]] && !cur[parts[i]].IsMap()) {
      throw ConfigError("override key '" + key + "' descends into a non-mapping");
    }
    YAML::Node next = cur[parts[i]];
    cur.reset(next);
  }
  /// `key=null` (or `key=~`) removes the field.
  if (value.IsNull()) {
    cur.remove(parts.back());
    return;
  }
  cur[parts.back()] = value;
}

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = points == 1 ? omega_min
                         : omega_min + (omega_max - omega_min) * static_cast<double>(i) /
                                           static_cast<double>(points - 1);
  }
  if (points > 1) out.back() = omega_max;
  return out;
}

RunConfig parse_run_config(const std::string& source, const fs::path& base,
                           const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(source);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("run file is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  check_keys(root, "", {"output_dir", "seed", "device", "cell_sweep", "dispersion", "gain",
                        "phase_match", "noise_sim", "noise_fit", "impedance", "ripple",
                        "transient", "fit_phase", "fit_flux"});

  RunConfig cfg;
  cfg.canonical_text = YAML::Dump(root);
  cfg.output_dir = text(root, "", "output_dir", "out");
  cfg.seed = static_cast<std::uint64_t>(count(root, "", "seed", 0));
  cfg.device = parse_device(root["device"]);

  if (const auto b = root["cell_sweep"]) {
    check_keys(b, "cell_sweep", {"points"});
    cfg.cell_sweep = CellSweepConfig{count(b, "cell_sweep", "points", 201)};
    if (cfg.cell_sweep->points < 2) throw ConfigError("field 'cell_sweep.points' must be >= 2");
  }
  if (const auto b = root["dispersion"]) {
    const std::string at = "dispersion";
    check_keys(b, at, {"flux_quanta", "grid", "theta0_rad"});
    cfg.dispersion = DispersionConfig{flux(b, at), parse_grid(b, at), number_or(b, at, "theta0_rad", 0.0)};
  }
  if (const auto b = root["gain"]) {
    const std::string at = "gain";
    check_keys(b, at, {"flux_quanta", "pump", "grid", "loss_profile", "gain_reference"});
    GainConfig g;
    g.phi_ext = flux(b, at);
    g.pump = parse_pump(b, at);
    g.grid = parse_grid(b, at);
    if (b["loss_profile"]) g.loss_profile = data_path(b, at, "loss_profile", base);
    const auto ref = text(b, at, "gain_reference", "absolute");
    if (ref == "absolute") {
      g.reference = GainReference::absolute;
    } else if (ref == "pump_off") {
      g.reference = GainReference::pump_off;
    } else {
      throw ConfigError("field 'gain.gain_reference' must be absolute or pump_off");
    }
    cfg.gain = g;
  }
  if (const auto b = root["phase_match"]) {
    const std::string at = "phase_match";
    check_keys(b, at, {"flux_quanta", "pump"});
    cfg.phase_match = PhaseMatchConfig{flux(b, at), parse_pump(b, at)};
  }
  if (const auto b = root["noise_sim"]) {
    const std::string at = "noise_sim";
    check_keys(b, at, {"flux_quanta", "pump", "grid", "loss_profile", "pump_loss_profile"});
    NoiseSimConfig n;
    n.phi_ext = flux(b, at);
    n.pump = parse_pump(b, at);
    n.grid = parse_grid(b, at);
    if (b["loss_profile"]) n.loss_profile = data_path(b, at, "loss_profile", base);
    if (b["pump_loss_profile"]) {
      n.pump_loss_profile = data_path(b, at, "pump_loss_profile", base);
    }
    cfg.noise_sim = n;
  }
  if (const auto b = root["noise_fit"]) {
    const std::string at = "noise_fit";
    check_keys(b, at, {"pump_ghz", "models", "output_line_data", "twpa_data", "idler_gain_data",
                       "synthetic"});
    NoiseFitConfig n;
    const double fp = number(b, at, "pump_ghz");
    require_positive(fp, "noise_fit.pump_ghz");
    n.omega_p = units::ghz_to_rad_per_s(fp);
    if (const auto m = b["models"]) {
      if (!m.IsSequence() || m.size() == 0) {
        throw ConfigError("field 'noise_fit.models' must be a non-empty list");
      }
      for (const auto& item : m) {
        n.models.push_back(parse_model(convert<std::string>(item, "noise_fit.models", "a string"),
                                       "noise_fit.models"));
      }
    } else {
      n.models = {noise::ModelKind::two_mode, noise::ModelKind::single_mode};
    }
    if (b["output_line_data"]) n.output_line_data = data_path(b, at, "output_line_data", base);
    if (b["twpa_data"]) n.twpa_data = data_path(b, at, "twpa_data", base);
    if (b["idler_gain_data"]) n.idler_gain_data = data_path(b, at, "idler_gain_data", base);
    if (const auto s = b["synthetic"]) {
      const std::string sat = "noise_fit.synthetic";
      check_keys(s, sat, {"freqs_ghz", "output_line_temperatures_mk", "twpa_temperatures_mk",
                          "g_out_db", "n_out_photons", "g_twpa_db", "n_twpa_photons", "model",
                          "noise_fraction"});
      SyntheticRadiometer syn;
      for (const double f : numbers(s, sat, "freqs_ghz")) {
        require_positive(f, join(sat, "freqs_ghz"));
        syn.omegas.push_back(units::ghz_to_rad_per_s(f));
      }
      syn.output_line_temperatures = kelvin_list(s, sat, "output_line_temperatures_mk");
      syn.twpa_temperatures = kelvin_list(s, sat, "twpa_temperatures_mk");
      syn.g_out_db = number(s, sat, "g_out_db");
      syn.n_out_photons = number(s, sat, "n_out_photons");
      syn.g_twpa_db = number(s, sat, "g_twpa_db");
      syn.n_twpa_photons = number(s, sat, "n_twpa_photons");
      syn.model = parse_model(text(s, sat, "model", "two_mode"), join(sat, "model"));
      syn.noise_fraction = number_or(s, sat, "noise_fraction", 0.0);
      if (!(syn.noise_fraction >= 0.0)) {
        throw ConfigError("field 'noise_fit.synthetic.noise_fraction' must be non-negative");
      }
      n.synthetic = syn;
    }
    const bool files = n.output_line_data || n.twpa_data;
    if (n.synthetic && files) {
      throw ConfigError("'noise_fit' takes either synthetic or data files, not both");
    }
    if (!n.synthetic && !(n.output_line_data && n.twpa_data)) {
      throw ConfigError("'noise_fit' needs output_line_data and twpa_data, or a synthetic block");
    }
    cfg.noise_fit = n;
  }
  if (const auto b = root["impedance"]) {
    const std::string at = "impedance";
    check_keys(b, at, {"ladder", "grid", "z0_ohm"});
    ImpedanceConfig im;
    const auto l = b["ladder"];
    const std::string lat = "impedance.ladder";
    if (!l) throw ConfigError("missing required block 'impedance.ladder'");
    check_keys(l, lat, {"l_ph", "c_ff", "n_cells", "modulation_amplitude", "modulation_period",
                        "modulate", "capacitance_phase"});
    im.ladder.l_cell = number_or(l, lat, "l_ph", 240.0) * 1e-12;
    im.ladder.c_cell = number_or(l, lat, "c_ff", 96.0) * 1e-15;
    im.ladder.n_cells = count(l, lat, "n_cells", 700);
    im.ladder.modulation_amplitude = number_or(l, lat, "modulation_amplitude", 0.0);
    im.ladder.modulation_period = count(l, lat, "modulation_period", 12);
    if (const auto m = l["modulate"]) {
      if (!m.IsSequence()) throw ConfigError("field 'impedance.ladder.modulate' must be a list");
      im.ladder.modulate_inductance = false;
      im.ladder.modulate_capacitance = false;
      for (const auto& item : m) {
        const auto name = convert<std::string>(item, "impedance.ladder.modulate", "a string");
        if (name == "inductance") {
          im.ladder.modulate_inductance = true;
        } else if (name == "capacitance") {
          im.ladder.modulate_capacitance = true;
        } else {
          throw ConfigError("field 'impedance.ladder.modulate' accepts inductance, capacitance");
        }
      }
    }
    const auto phase = text(l, lat, "capacitance_phase", "anti_phase");
    if (phase == "anti_phase") {
      im.ladder.capacitance_phase = ModulationPhase::anti_phase;
    } else if (phase == "in_phase") {
      im.ladder.capacitance_phase = ModulationPhase::in_phase;
    } else {
      throw ConfigError("field 'impedance.ladder.capacitance_phase' must be in_phase or anti_phase");
    }
    im.ladder.validate();
    im.grid = parse_grid(b, at);
    im.z0 = number_or(b, at, "z0_ohm", 50.0);
    require_positive(im.z0, "impedance.z0_ohm");
    cfg.impedance = im;
  }
  if (const auto b = root["ripple"]) {
    const std::string at = "ripple";
    check_keys(b, at, {"gain_db", "z0_ohm", "z_min_ohm", "z_max_ohm", "points"});
    RippleConfig r;
    r.gain_db = number_or(b, at, "gain_db", 20.0);
    r.z0 = number_or(b, at, "z0_ohm", 50.0);
    r.z_min = number_or(b, at, "z_min_ohm", 40.0);
    r.z_max = number_or(b, at, "z_max_ohm", 60.0);
    r.points = count(b, at, "points", 81);
    require_positive(r.z0, "ripple.z0_ohm");
    require_positive(r.z_min, "ripple.z_min_ohm");
    if (!(r.z_max >= r.z_min) || r.points < 2) {
      throw ConfigError("'ripple' needs z_max_ohm >= z_min_ohm and points >= 2");
    }
    cfg.ripple = r;
  }
  if (const auto b = root["transient"]) {
    const std::string at = "transient";
    check_keys(b, at, {"flux_quanta", "polarity", "probe_ghz", "probe_power_dbm", "dt_ps",
                       "duration_ns", "ring_up_ns", "ramp_ns", "decimation", "source_ohm",
                       "load_ohm"});
    TransientRunConfig t;
    if (b["flux_quanta"]) t.phi_ext = flux(b, at);
    const auto pol = text(b, at, "polarity", "both");
    if (pol == "both") {
      t.polarity = {false, true};
    } else if (pol == "on") {
      t.polarity = {true};
    } else if (pol == "off") {
      t.polarity = {false};
    } else {
      throw ConfigError("field 'transient.polarity' must be on, off or both");
    }
    t.probe_freq = number_or(b, at, "probe_ghz", 4.0) * 1e9;
    t.probe_power_dbm = number_or(b, at, "probe_power_dbm", -90.0);
    t.dt = number_or(b, at, "dt_ps", 0.0) * 1e-12;
    t.duration = number_or(b, at, "duration_ns", 25.0) * 1e-9;
    t.ring_up = number_or(b, at, "ring_up_ns", 8.0) * 1e-9;
    t.ramp = number_or(b, at, "ramp_ns", 2.0) * 1e-9;
    t.decimation = count(b, at, "decimation", 10);
    t.source_impedance = number_or(b, at, "source_ohm", 50.0);
    t.load_impedance = number_or(b, at, "load_ohm", 50.0);
    require_positive(t.probe_freq, "transient.probe_ghz");
    if (t.dt < 0.0) throw ConfigError("field 'transient.dt_ps' must be non-negative");
    cfg.transient = t;
  }
  if (const auto b = root["fit_phase"]) {
    check_keys(b, "fit_phase", {"data"});
    if (!b["data"]) throw ConfigError("missing required field 'fit_phase.data'");
    cfg.fit_phase = FitPhaseConfig{data_path(b, "fit_phase", "data", base)};
  }
  if (const auto b = root["fit_flux"]) {
    check_keys(b, "fit_flux", {"data"});
    if (!b["data"]) throw ConfigError("missing required field 'fit_flux.data'");
    cfg.fit_flux = FitFluxConfig{data_path(b, "fit_flux", "data", base)};
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read run file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_run_config(ss.str(), path.parent_path(), overrides);
  cfg.source_path = path;
  return cfg;
}

}  // namespace kerrtwpa::cli
