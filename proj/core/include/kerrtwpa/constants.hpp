#pragma once

#include <numbers>

namespace kerrtwpa::constants {

// CODATA 2018 exact SI values.
inline constexpr double planck = 6.62607015e-34;            // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double boltzmann = 1.380649e-23;            // J/K

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hbar = planck / two_pi;
/// Superconducting flux quantum h/2e.
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);
/// Reduced flux quantum h/(2e 2pi); converts phase to flux.
inline constexpr double reduced_flux_quantum = flux_quantum / two_pi;
/// Resistance quantum h/4e^2 as used in the current-phase expansion.
inline constexpr double resistance_quantum =
    planck / (4.0 * elementary_charge * elementary_charge);

}  // namespace kerrtwpa::constants

namespace kerrtwpa::units {

inline constexpr double ghz_to_rad_per_s(double f_ghz) {
  return constants::two_pi * f_ghz * 1e9;
}
inline constexpr double rad_per_s_to_ghz(double omega) {
  return omega / (constants::two_pi * 1e9);
}
inline constexpr double hz_to_rad_per_s(double f_hz) { return constants::two_pi * f_hz; }

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_power_ratio(double db);
double power_ratio_to_db(double ratio);

}  // namespace kerrtwpa::units
