#include "kerrtwpa/transient_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa {

namespace {

constexpr double kDtGuard = 0.05;  // dt * f_J must stay below this

// sin(a + d) - sin(a) without cancellation at small d.
double sin_increment(double a, double d) { return 2.0 * std::cos(a + 0.5 * d) * std::sin(0.5 * d); }

// cos(a) - cos(a + d), likewise.
double cos_decrement(double a, double d) { return 2.0 * std::sin(a + 0.5 * d) * std::sin(0.5 * d); }

}  // namespace

double Lattice::alpha(std::size_t n) const {
  const double psi = (branch_phase[n] - branch_flux[n]) / 3.0;
  return r * std::cos(branch_phase[n]) + std::cos(psi) / 3.0;
}

double Lattice::beta(std::size_t n) const {
  const double psi = (branch_phase[n] - branch_flux[n]) / 3.0;
  return 0.5 * (r * std::sin(branch_phase[n]) + std::sin(psi) / 9.0);
}

double Lattice::gamma(std::size_t n) const {
  const double psi = (branch_phase[n] - branch_flux[n]) / 3.0;
  return (r * std::cos(branch_phase[n]) + std::cos(psi) / 27.0) / 6.0;
}

double Lattice::branch_current(std::size_t n, double delta) const {
  const double psi = (branch_phase[n] - branch_flux[n]) / 3.0;
  return i0 * (r * sin_increment(branch_phase[n], delta) + sin_increment(psi, delta / 3.0));
}

double Lattice::branch_energy(std::size_t n, double delta) const {
  const double psi = (branch_phase[n] - branch_flux[n]) / 3.0;
  return constants::reduced_flux_quantum * i0 *
         (r * cos_decrement(branch_phase[n], delta) + 3.0 * cos_decrement(psi, delta / 3.0));
}

Lattice build_lattice(const SnailParameters& params, double phi_ext, bool polarity_enabled) {
  params.validate();
  Lattice lat;
  lat.i0 = params.i0;
  lat.r = params.r;
  lat.cg = params.cg;
  lat.cj = params.cj;
  lat.phi_ext = phi_ext;
  lat.polarity_enabled = polarity_enabled;

  // The current-phase relation is odd under (phi, phi_ext) -> (-phi, -phi_ext),
  // so the flipped cells reuse the mirrored steady state.
  const double phi_star = solve_steady_phase(params, phi_ext);
  const std::size_t n = params.n_cells;
  lat.branch_flux.resize(n);
  lat.branch_phase.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool flip = polarity_enabled && params.polarity[i] < 0 && phi_ext != 0.0;
    lat.branch_flux[i] = flip ? -phi_ext : phi_ext;
    lat.branch_phase[i] = flip ? -phi_star : phi_star;
  }
  lat.node_cg.assign(n + 1, params.cg);
  lat.node_cg.front() = 0.5 * params.cg;
  lat.node_cg.back() = 0.5 * params.cg;

  double alpha_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) alpha_max = std::max(alpha_max, lat.alpha(i));
  if (!(alpha_max > 0.0)) {
    throw ModelValidityError("lattice has no positive linear inductance at this flux");
  }
  const double l_min = constants::reduced_flux_quantum / (params.i0 * alpha_max);
  lat.omega_j = 1.0 / std::sqrt(l_min * params.cj);
  return lat;
}

double source_emf_amplitude(double power_dbm, double source_impedance) {
  return std::sqrt(8.0 * units::dbm_to_watts(power_dbm) * source_impedance);
}

namespace {

struct Timing {
  double dt;
  std::size_t record_samples;
};

/// Step and record length together, so the sample count used for the
/// alignment is the one integrated.
Timing resolve_timing(const TransientConfig& c, const Lattice& lattice) {
  const double f_j = lattice.omega_j / constants::two_pi;
  const double step = c.dt > 0.0 ? c.dt : 1.0 / (100.0 * f_j);
  const double decimation = static_cast<double>(std::max<std::size_t>(c.record_decimation, 1));
  const double spacing = step * decimation;
  const auto samples = static_cast<std::size_t>(
      std::max(0.0, std::floor((c.duration - c.ring_up) / spacing + 1e-9)));
  Timing t{step, samples};
  if (c.align_to_probe && c.probe_freq > 0.0 && samples > 0) {
    const double periods = std::floor(static_cast<double>(samples) * spacing * c.probe_freq);
    if (periods >= 1.0) {
      t.dt = periods / (c.probe_freq * static_cast<double>(samples) * decimation);
    }
  }
  return t;
}

}  // namespace

double TransientConfig::resolved_dt(const Lattice& lattice) const {
  return resolve_timing(*this, lattice).dt;
}

void TransientConfig::validate(const Lattice& lattice) const {
  const double f_j = lattice.omega_j / constants::two_pi;
  const double step = resolved_dt(lattice);
  if (!(step > 0.0) || step * f_j >= kDtGuard) {
    throw ConfigError("transient dt " + std::to_string(step) + " s violates dt < 0.05/f_J (f_J = " +
                      std::to_string(f_j * 1e-9) + " GHz)");
  }
  if (!(source_impedance > 0.0) || !(load_impedance > 0.0)) {
    throw ConfigError("transient source and load impedances must be positive");
  }
  if (!(probe_freq > 0.0)) throw ConfigError("transient probe_freq must be positive");
  if (record_decimation == 0) throw ConfigError("transient record_decimation must be >= 1");
  if (!(ring_up >= 0.0) || !(ramp >= 0.0)) {
    throw ConfigError("transient ring_up and ramp must be non-negative");
  }
  if (duration - ring_up < 20.0 / probe_freq) {
    throw ConfigError("transient duration must leave at least 20 probe periods after ring-up");
  }
}

double lattice_energy(const Lattice& lattice, const LatticeState& state) {
  const double phi0 = constants::reduced_flux_quantum;
  double e = 0.0;
  for (std::size_t i = 0; i < lattice.n_nodes(); ++i) {
    e += 0.5 * lattice.node_cg[i] * phi0 * phi0 * state.velocities[i] * state.velocities[i];
  }
  for (std::size_t i = 0; i < lattice.n_cells(); ++i) {
    const double dv = state.velocities[i] - state.velocities[i + 1];
    e += 0.5 * lattice.cj * phi0 * phi0 * dv * dv;
    e += lattice.branch_energy(i, state.phases[i] - state.phases[i + 1]);
  }
  return e;
}

namespace {

// Factorized (Cg + CJ D) in units of Phi0/2pi, solved by the Thomas algorithm.
class MassSolver {
 public:
  explicit MassSolver(const Lattice& lat) : n_(lat.n_nodes()), c_(n_), inv_(n_) {
    const double phi0 = constants::reduced_flux_quantum;
    const double off = -lat.cj * phi0;
    std::vector<double> diag(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double neighbours = (i == 0 || i + 1 == n_) ? 1.0 : 2.0;
      diag[i] = (lat.node_cg[i] + neighbours * lat.cj) * phi0;
    }
    off_ = off;
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double denom = diag[i] - (i > 0 ? off * prev_c : 0.0);
      inv_[i] = 1.0 / denom;
      c_[i] = off * inv_[i];
      prev_c = c_[i];
    }
  }

  void solve(std::vector<double>& rhs) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const double prev = i > 0 ? rhs[i - 1] : 0.0;
      rhs[i] = (rhs[i] - off_ * prev) * inv_[i];
    }
    for (std::size_t i = n_ - 1; i-- > 0;) rhs[i] -= c_[i] * rhs[i + 1];
  }

 private:
  std::size_t n_;
  double off_ = 0.0;
  std::vector<double> c_;
  std::vector<double> inv_;
};

double ramp_envelope(double t, double ramp) {
  if (ramp <= 0.0 || t >= ramp) return 1.0;
  if (t <= 0.0) return 0.0;
  return 0.5 * (1.0 - std::cos(constants::pi * t / ramp));
}

}  // namespace

TransientResult integrate(const Lattice& lat, const TransientConfig& cfg) {
  cfg.validate(lat);
  const double dt = cfg.resolved_dt(lat);
  const double phi0 = constants::reduced_flux_quantum;
  const std::size_t nodes = lat.n_nodes();
  const std::size_t last = nodes - 1;
  const double emf = cfg.drive_scale * source_emf_amplitude(cfg.probe_power_dbm, cfg.source_impedance);
  const double omega_p = constants::two_pi * cfg.probe_freq;

  const std::size_t record_samples = resolve_timing(cfg, lat).record_samples;
  const std::size_t ring_up_steps =
      cfg.record_decimation *
      static_cast<std::size_t>(std::ceil(cfg.ring_up / (dt * cfg.record_decimation) - 1e-9));
  const std::size_t total_steps = ring_up_steps + record_samples * cfg.record_decimation;

  MassSolver mass(lat);
  LatticeState s{std::vector<double>(nodes, 0.0), std::vector<double>(nodes, 0.0), 0.0};
  std::vector<double> acc(nodes, 0.0);

  auto emf_at = [&](double t) { return emf * ramp_envelope(t, cfg.ramp) * std::sin(omega_p * t); };

  // Accelerations from phases, the velocities used by the resistors, and time.
  auto accelerations = [&](const std::vector<double>& phases, const std::vector<double>& vel,
                           double t) {
    for (std::size_t i = 0; i < nodes; ++i) acc[i] = 0.0;
    for (std::size_t n = 0; n < lat.n_cells(); ++n) {
      const double current = lat.branch_current(n, phases[n] - phases[n + 1]);
      acc[n] -= current;
      acc[n + 1] += current;
    }
    acc[0] += (emf_at(t) - phi0 * vel[0]) / cfg.source_impedance;
    acc[last] -= phi0 * vel[last] / cfg.load_impedance;
    mass.solve(acc);
  };

  TransientResult out;
  out.dt = dt;
  out.sample_rate = 1.0 / (dt * cfg.record_decimation);
  out.time.reserve(record_samples);
  out.v_out.reserve(record_samples);
  out.v_source.reserve(record_samples);
  out.steps = total_steps;

  accelerations(s.phases, s.velocities, 0.0);
  std::vector<double> half(nodes);
  for (std::size_t step = 1; step <= total_steps; ++step) {
    for (std::size_t i = 0; i < nodes; ++i) {
      half[i] = s.velocities[i] + 0.5 * dt * acc[i];
      s.phases[i] += dt * half[i];
    }
    s.time = static_cast<double>(step) * dt;
    accelerations(s.phases, half, s.time);
    for (std::size_t i = 0; i < nodes; ++i) s.velocities[i] = half[i] + 0.5 * dt * acc[i];

    const bool sample = step % cfg.record_decimation == 0;
    if (!sample) continue;
    if (!std::isfinite(s.phases[last]) || !std::isfinite(s.velocities[last]) ||
        !std::isfinite(s.phases[0])) {
      throw SolverError("lattice integration diverged at t = " + std::to_string(s.time * 1e9) +
                            " ns",
                        s.phases[last]);
    }
    const double energy = lattice_energy(lat, s);
    if (!std::isfinite(energy)) {
      throw SolverError("lattice integration diverged at t = " + std::to_string(s.time * 1e9) +
                            " ns",
                        energy);
    }
    if (step <= ring_up_steps) {
      out.peak_energy_ring_up = std::max(out.peak_energy_ring_up, energy);
      continue;
    }
    out.peak_energy_record = std::max(out.peak_energy_record, energy);
    out.time.push_back(s.time);
    out.v_out.push_back(phi0 * s.velocities[last]);
    out.v_source.push_back(emf_at(s.time));
  }
  return out;
}

}  // namespace kerrtwpa
