#pragma once

#include <cstddef>
#include <vector>

#include "kerrtwpa/least_squares.hpp"

namespace kerrtwpa {

/// Removes 2 pi jumps: consecutive samples differing by more than pi are
/// shifted by whole turns.
std::vector<double> unwrap_phase(const std::vector<double>& phase);

struct PhaseSample {
  double omega = 0.0;  // rad/s
  double theta = 0.0;  // rad
};

struct DispersionFixed {
  std::size_t n_cells = 700;
  double c_g = 250e-15;
  double c_j = 50e-15;
};

struct DispersionFit {
  double l_cell = 0.0;  // H
  double theta0 = 0.0;  // rad
  double l_cell_se = 0.0;
  double theta0_se = 0.0;
  FitResult engine;     // parameters in (pH, rad)
};

/// theta(omega) = theta0 + N omega sqrt(L Cg) / sqrt(1 - omega^2 L Cj), fitted
/// with uniform weights after unwrapping. Trial inductances that put a data
/// point at or above the plasma frequency are rejected.
DispersionFit fit_dispersion_phase(const std::vector<PhaseSample>& data,
                                   const DispersionFixed& fixed);

struct FluxSample {
  double phi_ext = 0.0;  // rad
  double l_cell = 0.0;   // H
};

struct FluxFit {
  double i0 = 0.0;  // A
  double r = 0.0;
  double i0_se = 0.0;
  double r_se = 0.0;
  FitResult engine;  // parameters in (uA, 1)
};

/// Cell inductance of a SNAIL at one flux: Phi0/(2 pi I0 alpha~(phi_ext)).
double cell_inductance(double i0, double r, double phi_ext);

/// Fits L(phi_ext) = Phi0 / (2 pi I0 alpha~(phi_ext)) for I0 and r, with the
/// steady state followed by continuation inside every residual. The data
/// must span at least half a flux period.
FluxFit fit_flux_dependence(const std::vector<FluxSample>& data);

}  // namespace kerrtwpa
