#include "kerrtwpa/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/csv.hpp"
#include "kerrtwpa/errors.hpp"

namespace kerrtwpa {

namespace {

std::string ghz(double omega) {
  std::ostringstream os;
  os << units::rad_per_s_to_ghz(omega) << " GHz";
  return os.str();
}

}  // namespace

LossProfile::LossProfile(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw DataError("loss profile has no entries");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i].omega) || !std::isfinite(nodes_[i].s21_db)) {
      throw DataError("loss profile entry " + std::to_string(i) + " is not finite");
    }
    if (nodes_[i].s21_db > 0.0) {
      throw DataError("loss profile s21_db must be <= 0 (entry at " + ghz(nodes_[i].omega) + ")");
    }
    if (i > 0 && !(nodes_[i].omega > nodes_[i - 1].omega)) {
      throw DataError("loss profile frequencies must be strictly increasing (at " +
                      ghz(nodes_[i].omega) + ")");
    }
  }
}

LossProfile LossProfile::linear_in_frequency(double db_per_ghz, double f_min_ghz,
                                             double f_max_ghz, std::size_t n_nodes) {
  if (n_nodes < 2) n_nodes = 2;
  std::vector<Node> nodes;
  nodes.reserve(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double f = f_min_ghz + (f_max_ghz - f_min_ghz) * static_cast<double>(i) / (n_nodes - 1);
    nodes.push_back({units::ghz_to_rad_per_s(f), -db_per_ghz * f});
  }
  return LossProfile(std::move(nodes));
}

LossProfile LossProfile::lossless(double f_min_ghz, double f_max_ghz) {
  return linear_in_frequency(0.0, f_min_ghz, f_max_ghz, 2);
}

LossProfile LossProfile::from_csv(const std::filesystem::path& path) {
  const auto table = csv::read_file(path, {"freq_ghz", "s21_db"});
  std::vector<Node> nodes;
  nodes.reserve(table.rows.size());
  for (const auto& row : table.rows) nodes.push_back({units::ghz_to_rad_per_s(row[0]), row[1]});
  return LossProfile(std::move(nodes));
}

bool LossProfile::covers(double omega) const {
  return omega >= omega_min() && omega <= omega_max();
}

double LossProfile::s21_db(double omega) const {
  if (!covers(omega)) {
    throw DataError("frequency " + ghz(omega) + " outside loss profile range [" +
                    ghz(omega_min()) + ", " + ghz(omega_max()) + "]; extrapolation refused");
  }
  if (nodes_.size() == 1) return nodes_.front().s21_db;
  auto hi = std::lower_bound(nodes_.begin(), nodes_.end(), omega,
                             [](const Node& n, double w) { return n.omega < w; });
  if (hi == nodes_.begin()) return hi->s21_db;
  if (hi->omega == omega) return hi->s21_db;
  const auto lo = std::prev(hi);
  const double t = (omega - lo->omega) / (hi->omega - lo->omega);
  return lo->s21_db + t * (hi->s21_db - lo->s21_db);
}

double wavevector(const OperatingPoint& op, double omega) {
  if (!(omega >= 0.0)) throw ModelValidityError("negative mode frequency " + ghz(omega));
  if (!(omega < op.omega_j)) {
    throw ModelValidityError("mode at " + ghz(omega) + " is above the plasma cutoff " +
                             ghz(op.omega_j));
  }
  const double x = omega / op.omega_j;
  return omega / (op.omega0 * std::sqrt(1.0 - x * x));
}

double transmitted_phase(const OperatingPoint& op, std::size_t n_cells, double theta0,
                         double omega) {
  return theta0 + static_cast<double>(n_cells) * wavevector(op, omega);
}

double delta_k_dispersion(const OperatingPoint& op, double omega_s, double omega_p) {
  const double omega_i = 2.0 * omega_p - omega_s;
  if (!(omega_i > 0.0)) {
    throw ModelValidityError("idler frequency " + ghz(omega_i) + " is not positive");
  }
  return wavevector(op, omega_s) + wavevector(op, omega_i) - 2.0 * wavevector(op, omega_p);
}

double kappa_from_loss(const LossProfile& profile, std::size_t n_cells, double omega) {
  if (n_cells == 0) throw ConfigError("n_cells must be positive");
  return std::numbers::ln10 * std::abs(profile.s21_db(omega)) /
         (20.0 * static_cast<double>(n_cells));
}

ModeWavevector mode_at(const OperatingPoint& op, double omega, const LossProfile* profile,
                       std::size_t n_cells) {
  ModeWavevector m;
  m.omega = omega;
  m.k = wavevector(op, omega);
  m.kappa2 = profile ? kappa_from_loss(*profile, n_cells, omega) : 0.0;
  return m;
}

}  // namespace kerrtwpa
