#pragma once

#include <cstddef>
#include <vector>

#include "kerrtwpa/snail_cell.hpp"

namespace kerrtwpa {

/// Per-branch data of the discrete line. Node n connects to node n + 1 through
/// branch n; there are n_cells branches and n_cells + 1 nodes.
struct Lattice {
  double i0 = 0.0;
  double r = 0.0;
  double cg = 0.0;
  double cj = 0.0;
  double phi_ext = 0.0;
  bool polarity_enabled = false;
  std::vector<double> branch_flux;   // sigma_n phi_ext
  std::vector<double> branch_phase;  // steady-state phase of each branch
  std::vector<double> node_cg;       // ground capacitance per node, F
  double omega_j = 0.0;              // highest plasma frequency over the branches, rad/s

  [[nodiscard]] std::size_t n_cells() const { return branch_phase.size(); }
  [[nodiscard]] std::size_t n_nodes() const { return node_cg.size(); }

  /// Expansion coefficients of branch n about its steady state.
  [[nodiscard]] double alpha(std::size_t n) const;
  [[nodiscard]] double beta(std::size_t n) const;
  [[nodiscard]] double gamma(std::size_t n) const;

  /// Branch current for a phase excursion delta about the steady state;
  /// exactly zero at delta = 0.
  [[nodiscard]] double branch_current(std::size_t n, double delta) const;
  /// Josephson energy stored for the same excursion.
  [[nodiscard]] double branch_energy(std::size_t n, double delta) const;
};

/// Cell n uses flux sigma_n phi_ext with sigma_n from the device polarity
/// (all +1 when polarity is disabled). The end nodes carry cg/2 so the
/// total ground capacitance is n_cells * cg.
Lattice build_lattice(const SnailParameters& params, double phi_ext, bool polarity_enabled);

struct LatticeState {
  std::vector<double> phases;      // rad, relative to steady state
  std::vector<double> velocities;  // rad/s
  double time = 0.0;
};

struct TransientConfig {
  double dt = 0.0;                 // s; 0 selects 1/(100 f_J)
  double duration = 25e-9;         // s, total including ring-up
  double ring_up = 8e-9;           // s discarded before recording
  double ramp = 2e-9;              // s, raised-cosine turn-on of the source
  double probe_freq = 4e9;         // Hz
  double probe_power_dbm = -90.0;  // available power of the source
  double source_impedance = 50.0;
  double load_impedance = 50.0;
  std::size_t record_decimation = 10;
  /// Shrinks dt slightly so the recorded window spans a whole number of
  /// probe periods, placing the probe and its harmonics on FFT bins.
  bool align_to_probe = true;
  /// Scales the source EMF; 0 gives the quiescent run.
  double drive_scale = 1.0;

  /// dt resolved against the lattice and the probe alignment.
  [[nodiscard]] double resolved_dt(const Lattice& lattice) const;
  /// Throws ConfigError on violated guards.
  void validate(const Lattice& lattice) const;
};

struct TransientResult {
  double dt = 0.0;
  double sample_rate = 0.0;       // of the recorded series, Hz
  std::vector<double> time;       // s, of recorded samples
  std::vector<double> v_out;      // V across the load
  std::vector<double> v_source;   // source EMF at the same instants
  double peak_energy_ring_up = 0.0;
  double peak_energy_record = 0.0;
  std::size_t steps = 0;
};

/// Source EMF amplitude delivering `power_dbm` into a matched load:
/// sqrt(8 P R).
double source_emf_amplitude(double power_dbm, double source_impedance);

/// Total lattice energy: node and junction capacitances plus Josephson.
double lattice_energy(const Lattice& lattice, const LatticeState& state);

/// Velocity-Verlet integration of the node equations with the junction
/// capacitance coupling solved as a tridiagonal system each step. The
/// resistive boundary currents use the half-step velocities. Throws
/// SolverError with the time stamp if the state stops being finite.
TransientResult integrate(const Lattice& lattice, const TransientConfig& config);

}  // namespace kerrtwpa
