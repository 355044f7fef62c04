#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/dispersion.hpp"
#include "kerrtwpa/errors.hpp"
#include "kerrtwpa/spectrum.hpp"
#include "kerrtwpa/transient_lattice.hpp"

namespace kt = kerrtwpa;
using kt::constants::pi;
using kt::constants::two_pi;

namespace {

kt::SnailParameters short_device(std::size_t n) {
  return kt::SnailParameters::make(2.19e-6, 0.07, 250e-15, 50e-15, n);
}

kt::TransientConfig quick_config() {
  kt::TransientConfig cfg;
  cfg.duration = 12e-9;
  cfg.ring_up = 4e-9;
  cfg.ramp = 1e-9;
  return cfg;
}

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / v.size());
}

}  // namespace

TEST(BuildLattice, PolarityFlipsBetaOnly) {
  const auto p = short_device(40);
  const double flux = 1.1;
  const auto lat = kt::build_lattice(p, flux, true);
  ASSERT_EQ(lat.n_cells(), 40u);
  ASSERT_EQ(lat.n_nodes(), 41u);
  for (std::size_t n = 0; n + 1 < lat.n_cells(); ++n) {
    EXPECT_EQ(lat.beta(n), -lat.beta(n + 1)) << n;
    EXPECT_NE(lat.beta(n), 0.0);
    EXPECT_EQ(lat.alpha(n), lat.alpha(n + 1));
    EXPECT_EQ(lat.gamma(n), lat.gamma(n + 1));
  }
  const auto plain = kt::build_lattice(p, flux, false);
  for (std::size_t n = 0; n < plain.n_cells(); ++n) EXPECT_EQ(plain.beta(n), plain.beta(0));
}

TEST(BuildLattice, ZeroFluxIgnoresPolarity) {
  const auto p = short_device(30);
  const auto a = kt::build_lattice(p, 0.0, true);
  const auto b = kt::build_lattice(p, 0.0, false);
  EXPECT_EQ(a.branch_phase, b.branch_phase);
  EXPECT_EQ(a.node_cg, b.node_cg);
  for (std::size_t n = 0; n < a.n_cells(); ++n) {
    EXPECT_EQ(a.branch_flux[n], b.branch_flux[n]);
    EXPECT_EQ(a.branch_current(n, 0.01), b.branch_current(n, 0.01));
  }
}

TEST(BuildLattice, EndNodesCarryHalfGroundCapacitance) {
  const auto lat = kt::build_lattice(short_device(10), 1.0, true);
  double total = 0.0;
  for (double c : lat.node_cg) total += c;
  EXPECT_NEAR(total, 10 * 250e-15, 1e-27);
  EXPECT_EQ(lat.node_cg.front(), 125e-15);
  EXPECT_EQ(lat.node_cg.back(), 125e-15);
}

TEST(BuildLattice, BranchCurrentVanishesAtSteadyState) {
  const auto lat = kt::build_lattice(short_device(10), 1.7, true);
  for (std::size_t n = 0; n < lat.n_cells(); ++n) {
    EXPECT_EQ(lat.branch_current(n, 0.0), 0.0);
    EXPECT_EQ(lat.branch_energy(n, 0.0), 0.0);
    // Small excursion follows the linear inductance.
    const double d = 1e-7;
    EXPECT_NEAR(lat.branch_current(n, d) / (lat.i0 * lat.alpha(n) * d), 1.0, 1e-5);
  }
}

TEST(Integrate, ConfigGuards) {
  const auto lat = kt::build_lattice(short_device(20), 1.0, true);
  auto cfg = quick_config();
  cfg.dt = 1.0 / (lat.omega_j / two_pi) * 0.06;
  EXPECT_THROW(kt::integrate(lat, cfg), kt::ConfigError);
  cfg = quick_config();
  cfg.duration = cfg.ring_up + 10.0 / cfg.probe_freq;
  EXPECT_THROW(kt::integrate(lat, cfg), kt::ConfigError);
  cfg = quick_config();
  cfg.load_impedance = 0.0;
  EXPECT_THROW(kt::integrate(lat, cfg), kt::ConfigError);
}

TEST(Integrate, ZeroDriveGivesZeroOutput) {
  const auto lat = kt::build_lattice(short_device(60), 1.0, true);
  auto cfg = quick_config();
  cfg.drive_scale = 0.0;
  const auto res = kt::integrate(lat, cfg);
  ASSERT_FALSE(res.v_out.empty());
  for (double v : res.v_out) EXPECT_LT(std::abs(v), 1e-18);
}

TEST(Integrate, LinearInSmallDrive) {
  const auto lat = kt::build_lattice(short_device(60), 1.0, false);
  auto cfg = quick_config();
  cfg.drive_scale = 1e-6;
  const double a = rms(kt::integrate(lat, cfg).v_out);
  cfg.drive_scale = 3e-6;
  const double b = rms(kt::integrate(lat, cfg).v_out);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(b / (3.0 * a), 1.0, 1e-3);
}

TEST(Integrate, DeterministicAndEnergyBounded) {
  const auto lat = kt::build_lattice(short_device(80), 1.0, true);
  const auto cfg = quick_config();
  const auto a = kt::integrate(lat, cfg);
  const auto b = kt::integrate(lat, cfg);
  EXPECT_EQ(a.v_out, b.v_out);
  EXPECT_GT(a.peak_energy_ring_up, 0.0);
  EXPECT_LE(a.peak_energy_record, 2.0 * a.peak_energy_ring_up);
}

TEST(Integrate, PolarityFlagOnlyChangesSignPattern) {
  // With zero flux the sign pattern is immaterial, so both runs coincide.
  const auto p = short_device(50);
  const auto cfg = quick_config();
  const auto on = kt::integrate(kt::build_lattice(p, 0.0, true), cfg);
  const auto off = kt::integrate(kt::build_lattice(p, 0.0, false), cfg);
  EXPECT_EQ(on.v_out, off.v_out);
  EXPECT_EQ(on.time, off.time);
}

TEST(Integrate, RecordSpansWholeProbePeriods) {
  const auto lat = kt::build_lattice(short_device(20), 1.0, true);
  const auto cfg = quick_config();
  const auto res = kt::integrate(lat, cfg);
  const double periods = res.v_out.size() / res.sample_rate * cfg.probe_freq;
  EXPECT_NEAR(periods, std::round(periods), 1e-6);
  EXPECT_GE(periods, 20.0);
}

TEST(Integrate, QuiescentEnergyIsZero) {
  const auto lat = kt::build_lattice(short_device(5), 1.0, true);
  kt::LatticeState s;
  s.phases.assign(lat.n_nodes(), 0.0);
  s.velocities.assign(lat.n_nodes(), 0.0);
  EXPECT_EQ(kt::lattice_energy(lat, s), 0.0);
}

TEST(Integrate, SmallSignalPhaseMatchesDispersion) {
  const std::size_t n = 200;
  const auto p = short_device(n);
  const double flux = pi;
  const auto lat = kt::build_lattice(p, flux, true);
  const auto op = kt::operating_point(p, flux);
  for (double f : {2e9, 4e9, 6e9}) {
    auto cfg = quick_config();
    cfg.duration = 16e-9;
    cfg.probe_freq = f;
    cfg.probe_power_dbm = -110.0;
    const auto res = kt::integrate(lat, cfg);
    const double w = two_pi * f;
    std::complex<double> zo = 0.0, zs = 0.0;
    for (std::size_t i = 0; i < res.v_out.size(); ++i) {
      const auto e = std::exp(std::complex<double>(0.0, -w * res.time[i]));
      zo += res.v_out[i] * e;
      zs += res.v_source[i] * e;
    }
    const double lag = std::arg(zs / zo);
    const double predicted = kt::transmitted_phase(op, n, 0.0, w);
    const double diff = std::remainder(lag - predicted, two_pi);
    EXPECT_LT(std::abs(diff), 0.02 * predicted) << f;
    // The discrete chain carries 2 asin(k/2) per cell rather than k.
    const double k = kt::wavevector(op, w);
    const double discrete = std::remainder(lag - 2.0 * n * std::asin(k / 2.0), two_pi);
    EXPECT_LT(std::abs(discrete), 0.2) << f;
  }
}

TEST(Integrate, SecondHarmonicSuppressedWithPolarity) {
  const auto p = short_device(200);
  const double flux = kt::flux_of_max_g3(p);
  auto cfg = quick_config();
  cfg.probe_power_dbm = -80.0;
  cfg.record_decimation = 5;
  auto ratio = [&](bool pol) {
    const auto res = kt::integrate(kt::build_lattice(p, flux, pol), cfg);
    return kt::second_harmonic_ratio(kt::spectrum(res.v_out, res.sample_rate), cfg.probe_freq);
  };
  EXPECT_LT(ratio(true) - ratio(false), -20.0);
}

TEST(SourceEmf, MatchedPowerDelivery) {
  const double emf = kt::source_emf_amplitude(-90.0, 50.0);
  // Matched load sees half the EMF; mean power (V/2)^2 / (2R).
  EXPECT_NEAR((emf / 2) * (emf / 2) / (2 * 50.0), 1e-12, 1e-24);
}
