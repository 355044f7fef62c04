#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "kerrtwpa/snail_cell.hpp"

namespace kerrtwpa {

/// Propagation constants of one mode. k and kappa2 are per cell: the
/// coordinate along the line counts SNAILs.
struct ModeWavevector {
  double omega = 0.0;   // rad/s
  double k = 0.0;       // rad/cell
  double kappa2 = 0.0;  // nepers/cell, amplitude attenuation
};

/// Measured small-signal transmission |S21| in dB versus frequency,
/// interpolated linearly in (omega, dB).
class LossProfile {
 public:
  struct Node {
    double omega;   // rad/s
    double s21_db;  // <= 0
  };

  /// Throws DataError unless frequencies are strictly increasing and all
  /// s21_db <= 0.
  explicit LossProfile(std::vector<Node> nodes);

  /// Loss growing linearly with frequency, s21_db(f) = -db_per_ghz * f_GHz,
  /// tabulated on [f_min_ghz, f_max_ghz].
  static LossProfile linear_in_frequency(double db_per_ghz, double f_min_ghz, double f_max_ghz,
                                         std::size_t n_nodes = 2);

  /// Zero loss on [f_min_ghz, f_max_ghz].
  static LossProfile lossless(double f_min_ghz, double f_max_ghz);

  /// Reads a `freq_ghz,s21_db` CSV file.
  static LossProfile from_csv(const std::filesystem::path& path);

  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] double omega_min() const { return nodes_.front().omega; }
  [[nodiscard]] double omega_max() const { return nodes_.back().omega; }
  [[nodiscard]] bool covers(double omega) const;

  /// Interpolated |S21| in dB; DataError outside the tabulated range.
  [[nodiscard]] double s21_db(double omega) const;

 private:
  std::vector<Node> nodes_;
};

/// Linear dispersion k(omega) = omega / (omega0 sqrt(1 - omega^2/omega_J^2)).
/// ModelValidityError at or above the plasma frequency.
double wavevector(const OperatingPoint& op, double omega);

/// Phase accumulated through n_cells plus the wrap offset theta0.
double transmitted_phase(const OperatingPoint& op, std::size_t n_cells, double theta0,
                         double omega);

/// Linear mismatch k_s + k_i - 2 k_p with omega_i = 2 omega_p - omega_s.
double delta_k_dispersion(const OperatingPoint& op, double omega_s, double omega_p);

/// Amplitude attenuation per cell reproducing the profile's |S21| over
/// n_cells: kappa2 = ln(10) |s21_db| / (20 n_cells).
double kappa_from_loss(const LossProfile& profile, std::size_t n_cells, double omega);

/// Convenience: wavevector plus attenuation (zero when no profile given).
ModeWavevector mode_at(const OperatingPoint& op, double omega, const LossProfile* profile,
                       std::size_t n_cells);

}  // namespace kerrtwpa
