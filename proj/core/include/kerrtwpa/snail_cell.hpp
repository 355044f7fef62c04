#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kerrtwpa {

/// Fabrication-level description of a SNAIL meta-material.
///
/// Each cell is a loop of three large junctions (critical current i0) in
/// one arm and one small junction (r * i0) in the other, shunted to ground
/// by cg. cj is the effective junction capacitance across the cell.
struct SnailParameters {
  double i0 = 0.0;          // A
  double r = 0.0;           // small/large critical current ratio
  double cg = 0.0;          // F
  double cj = 0.0;          // F
  std::size_t n_cells = 0;
  std::vector<int> polarity;  // +1/-1 per cell

  /// Alternating polarity (+1, -1, +1, ...) of the given length.
  static std::vector<int> alternating_polarity(std::size_t n_cells);

  /// Builds and validates; an empty polarity defaults to alternating.
  static SnailParameters make(double i0, double r, double cg, double cj, std::size_t n_cells,
                              std::vector<int> polarity = {});

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Parameters of the meta-material at I0 = 2.19 uA, r = 0.07, Cg = 250 fF,
/// CJ = 50 fF, 700 cells, alternating polarity.
SnailParameters reference_device();

/// All flux-derived linear and nonlinear coefficients at one bias point.
struct OperatingPoint {
  double phi_ext = 0.0;   // reduced external flux, rad
  double phi_star = 0.0;  // steady-state phase across the cell, rad
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double l_cell = 0.0;    // H
  double c_ground = 0.0;  // F, copied from the device
  double c_junction = 0.0;
  double z_char = 0.0;    // ohm
  double omega0 = 0.0;    // rad/s
  double omega_j = 0.0;   // rad/s
  double g3 = 0.0;        // rad/s
  double g4 = 0.0;        // rad/s

  /// Dimensionless Kerr coefficient gamma~/alpha~ entering the wave equation.
  [[nodiscard]] double kerr_coefficient() const { return gamma / alpha; }
};

/// Normalized current-phase relation I(phi)/I0 = r sin(phi) + sin((phi - phi_ext)/3).
double snail_current(double r, double phi, double phi_ext);

/// First three phase derivatives of snail_current.
struct CurrentDerivatives {
  double d1, d2, d3;
};
CurrentDerivatives snail_current_derivatives(double r, double phi, double phi_ext);

/// Solves I(phi*) = 0 on the branch connected to phi* = 0 at phi_ext = 0.
///
/// The branch is followed by continuation in phi_ext from zero, so the
/// result matches an adiabatically flux-biased device. Throws SolverError
/// with the last residual if Newton fails to converge.
double solve_steady_phase(const SnailParameters& params, double phi_ext);

/// Same continuation for a bare asymmetry ratio; r = 0 is admitted here.
double solve_steady_phase(double r, double phi_ext);

/// Newton polish from an explicit starting guess; used by continuation.
double solve_steady_phase_from(double r, double phi_ext, double guess);

OperatingPoint operating_point(const SnailParameters& params, double phi_ext);

/// Operating point from an already-solved steady phase.
OperatingPoint operating_point_at(const SnailParameters& params, double phi_ext,
                                  double phi_star);

/// n_points operating points on a uniform grid over [0, 2pi], in order,
/// with phi* tracked continuously along the sweep.
std::vector<OperatingPoint> flux_sweep(const SnailParameters& params, std::size_t n_points);

/// External flux in [0, pi] maximizing |g3|, located by golden-section
/// refinement of a coarse sweep.
double flux_of_max_g3(const SnailParameters& params);

}  // namespace kerrtwpa
