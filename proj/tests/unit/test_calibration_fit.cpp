#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kerrtwpa/calibration_fit.hpp"
#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/errors.hpp"

namespace kt = kerrtwpa;
using kt::constants::pi;
using kt::constants::two_pi;

namespace {

double model_phase(double l, double theta0, double omega) {
  return theta0 + 700.0 * omega * std::sqrt(l * 250e-15) / std::sqrt(1.0 - omega * omega * l * 50e-15);
}

std::vector<kt::PhaseSample> phase_data(double l, double theta0, bool wrap, double noise_deg,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise_deg * pi / 180.0);
  std::vector<kt::PhaseSample> out;
  for (double f = 1.0; f <= 12.0 + 1e-9; f += 0.025) {
    const double w = two_pi * f * 1e9;
    double th = model_phase(l, theta0, w) + (noise_deg > 0 ? n(rng) : 0.0);
    if (wrap) th = std::remainder(th, two_pi);
    out.push_back({w, th});
  }
  return out;
}

std::vector<kt::FluxSample> flux_data(double i0, double r, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<kt::FluxSample> out;
  for (int k = 0; k <= 40; ++k) {
    const double phi = two_pi * k / 40.0;
    double l = kt::cell_inductance(i0, r, phi);
    if (noise > 0) l *= 1.0 + noise * n(rng);
    out.push_back({phi, l});
  }
  return out;
}

}  // namespace

TEST(Unwrap, RemovesTwoPiJumps) {
  std::vector<double> truth, wrapped;
  for (int i = 0; i < 200; ++i) {
    truth.push_back(0.2 * i - 3.0);
    wrapped.push_back(std::remainder(truth.back(), two_pi));
  }
  const auto u = kt::unwrap_phase(wrapped);
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_NEAR(u[i] - u[0], truth[i] - truth[0], 1e-12);
  }
  EXPECT_TRUE(kt::unwrap_phase({}).empty());
}

TEST(PhaseFit, NoiseFreeRoundTrip) {
  const auto fit = kt::fit_dispersion_phase(phase_data(570.8e-12, 3.0, true, 0.0, 0), {});
  EXPECT_NEAR(fit.l_cell / 570.8e-12, 1.0, 1e-4);
  EXPECT_NEAR(std::remainder(fit.theta0 - 3.0, two_pi), 0.0, 1e-6);
  EXPECT_TRUE(fit.engine.converged);
}

TEST(PhaseFit, TwoPiShiftOnlyMovesOffset) {
  const auto a = kt::fit_dispersion_phase(phase_data(570.8e-12, 3.0, false, 0.0, 0), {});
  const auto b = kt::fit_dispersion_phase(phase_data(570.8e-12, 3.0 + two_pi, false, 0.0, 0), {});
  EXPECT_NEAR(a.l_cell / b.l_cell, 1.0, 1e-9);
  EXPECT_NEAR(b.theta0 - a.theta0, two_pi, 1e-6);
}

TEST(PhaseFit, MonteCarloHalfDegreeNoise) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = kt::fit_dispersion_phase(phase_data(570.8e-12, 3.0, true, 0.5, seed), {});
    EXPECT_NEAR(fit.l_cell / 570.8e-12, 1.0, 0.005) << seed;
    EXPECT_GT(fit.l_cell_se, 0.0);
  }
}

TEST(PhaseFit, RejectsBadData) {
  EXPECT_THROW(kt::fit_dispersion_phase({{1e10, 0.1}, {2e10, 0.2}}, {}), kt::DataError);
  EXPECT_THROW(kt::fit_dispersion_phase({{1e10, 0.1}, {1e10, 0.2}, {2e10, 0.3}}, {}),
               kt::DataError);
}

TEST(FluxFit, NoiseFreeRoundTrip) {
  const auto fit = kt::fit_flux_dependence(flux_data(2.19e-6, 0.07, 0.0, 0));
  EXPECT_NEAR(fit.i0 / 2.19e-6, 1.0, 1e-3);
  EXPECT_NEAR(fit.r / 0.07, 1.0, 1e-3);
  EXPECT_TRUE(fit.engine.converged);
}

TEST(FluxFit, SymmetricDeviceGivesZeroAsymmetry) {
  const auto fit = kt::fit_flux_dependence(flux_data(2.19e-6, 0.0, 0.0, 0));
  EXPECT_LT(fit.r, 1e-4);
  EXPECT_NEAR(fit.i0 / 2.19e-6, 1.0, 1e-3);
}

TEST(FluxFit, MonteCarloOnePercentNoise) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = kt::fit_flux_dependence(flux_data(2.19e-6, 0.07, 0.01, seed));
    EXPECT_NEAR(fit.i0 / 2.19e-6, 1.0, 0.02) << seed;
    EXPECT_NEAR(fit.r / 0.07, 1.0, 0.10) << seed;
  }
}

TEST(FluxFit, NeedsHalfPeriodSpan) {
  std::vector<kt::FluxSample> d;
  for (int k = 0; k < 10; ++k) d.push_back({0.2 * k, kt::cell_inductance(2e-6, 0.07, 0.2 * k)});
  EXPECT_THROW(kt::fit_flux_dependence(d), kt::DataError);
}

TEST(CellInductance, HalfFluxValue) {
  EXPECT_NEAR(kt::cell_inductance(2.19e-6, 0.07, pi), 570.6710221526847e-12, 1e-21);
}
