#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/coupled_mode.hpp"
#include "kerrtwpa/errors.hpp"

namespace kt = kerrtwpa;
using kt::constants::pi;
using kt::units::ghz_to_rad_per_s;

namespace {

kt::OperatingPoint half_flux() { return kt::operating_point(kt::reference_device(), pi); }

kt::CoupledModeSystem::Inputs abstract_inputs(double eta_s, double eta_i, double eta_p,
                                              double dk_total, std::size_t n) {
  kt::CoupledModeSystem::Inputs in;
  in.kerr = {eta_s, eta_i, eta_p, eta_s + eta_i - 2.0 * eta_p};
  in.delta_k_dispersion = dk_total - in.kerr.delta_k_kerr;
  in.k_s = 0.4;
  in.k_i = 0.7;
  in.n_cells = n;
  return in;
}

double power(const kt::Complex& z) { return std::norm(z); }

}  // namespace

TEST(PumpAmplitude, ZeroPowerLimitAndSquareRootScaling) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  EXPECT_LT(kt::pump_amplitude_from_power(op, wp, -400.0), 1e-12);
  EXPECT_EQ(kt::pump_amplitude_from_power(op, wp, -std::numeric_limits<double>::infinity()), 0.0);
  const double a1 = kt::pump_amplitude_from_power(op, wp, -75.0);
  const double a2 = kt::pump_amplitude_from_power(op, wp, -75.0 + 10.0 * std::log10(2.0));
  EXPECT_NEAR(a2 / a1, std::sqrt(2.0), 1e-12);
}

TEST(PumpAmplitude, PowerRoundTrip) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const double a = kt::pump_amplitude_from_power(op, wp, -75.0);
  EXPECT_NEAR(kt::pump_power_from_amplitude(op, wp, a), -75.0, 1e-9);
  const auto drive = kt::PumpDrive::from_power(op, wp, -75.0);
  ASSERT_TRUE(drive.input_power_dbm.has_value());
  EXPECT_EQ(drive.a_p0, a);
}

TEST(KerrShifts, ZeroAmplitudeGivesZero) {
  const auto k = kt::kerr_phase_shifts(half_flux(), ghz_to_rad_per_s(6.0), ghz_to_rad_per_s(8.0), 0.0);
  EXPECT_EQ(k.eta_s, 0.0);
  EXPECT_EQ(k.eta_i, 0.0);
  EXPECT_EQ(k.eta_p, 0.0);
  EXPECT_EQ(k.delta_k_kerr, 0.0);
}

TEST(KerrShifts, DegenerateMismatchIsTwiceSelfPhase) {
  const double wp = ghz_to_rad_per_s(8.0);
  const auto k = kt::kerr_phase_shifts(half_flux(), wp, wp, 2.0);
  EXPECT_NEAR(k.eta_s, 2.0 * k.eta_p, 1e-15 * std::abs(k.eta_p));
  EXPECT_NEAR(k.delta_k_kerr, 2.0 * k.eta_p, 1e-15 * std::abs(k.eta_p));
}

TEST(KerrShifts, ReversedSignAtHalfFlux) {
  const auto op = half_flux();
  ASSERT_LT(op.gamma, 0.0);
  const double wp = ghz_to_rad_per_s(8.0);
  for (int i = 1; i < 400; ++i) {
    const double ws = ghz_to_rad_per_s(4.0 + 8.0 * i / 400.0);
    if (std::abs(ws - wp) < 1.0) continue;
    const double kerr = kt::kerr_phase_shifts(op, ws, wp, 1.0).delta_k_kerr;
    const double disp = kt::delta_k_dispersion(op, ws, wp);
    EXPECT_LT(kerr, 0.0);
    EXPECT_GT(disp, 0.0);
  }
}

TEST(KerrShifts, SameSignAsGammaAtZeroFlux) {
  const auto op = kt::operating_point(kt::reference_device(), 0.0);
  const auto k = kt::kerr_phase_shifts(op, ghz_to_rad_per_s(6.0), ghz_to_rad_per_s(8.0), 1.0);
  EXPECT_GT(k.eta_s, 0.0);
  EXPECT_GT(k.eta_i, 0.0);
  EXPECT_GT(k.eta_p, 0.0);
}

TEST(CoupledModeSystem, RejectsInconsistentInputs) {
  auto in = abstract_inputs(1e-3, 1e-3, 1e-3, 0.0, 10);
  in.kerr.delta_k_kerr += 1e-6;
  EXPECT_THROW(kt::CoupledModeSystem{in}, kt::ModelValidityError);
  in = abstract_inputs(1e-3, -1e-3, 1e-3, 0.0, 10);
  EXPECT_THROW(kt::CoupledModeSystem{in}, kt::ModelValidityError);
  in = abstract_inputs(1e-3, 1e-3, 1e-3, 0.0, 10);
  in.kappa2_s = -1.0;
  EXPECT_THROW(kt::CoupledModeSystem{in}, kt::ModelValidityError);
  in = abstract_inputs(1e-3, 1e-3, 1e-3, 0.0, 0);
  EXPECT_THROW(kt::CoupledModeSystem{in}, kt::ConfigError);
}

TEST(Propagate, ZeroGeneratorIsIdentity) {
  const kt::CoupledModeSystem sys(abstract_inputs(0.0, 0.0, 0.0, 0.0, 700));
  EXPECT_LT((kt::propagate(sys) - kt::Matrix2c::Identity()).norm(), 1e-15);
}

TEST(Propagate, DecoupledModesOnlyAcquirePhase) {
  const double dk = 0.013;
  const std::size_t n = 700;
  const kt::CoupledModeSystem sys(abstract_inputs(0.0, 0.0, 0.0, dk, n));
  const auto s = kt::propagate(sys);
  const kt::Complex i(0.0, 1.0);
  EXPECT_LT(std::abs(s(0, 0) - std::exp(-i * dk * double(n) / 2.0)), 1e-12);
  EXPECT_LT(std::abs(s(1, 1) - std::exp(i * dk * double(n) / 2.0)), 1e-12);
  EXPECT_NEAR(power(s(0, 0)), 1.0, 1e-14);
}

TEST(Propagate, PureAttenuation) {
  auto in = abstract_inputs(0.0, 0.0, 0.0, 0.0, 700);
  in.kappa2_s = in.kappa2_i = 4e-4;
  const auto s = kt::propagate(kt::CoupledModeSystem(in));
  EXPECT_NEAR(std::abs(s(0, 0)), std::exp(-4e-4 * 700), 1e-14);
}

TEST(Propagate, LosslessSymplecticAndAnalyticEquivalence) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 100 + static_cast<std::size_t>(u(rng) * 900);
    const double sign = (trial % 2) ? -1.0 : 1.0;
    const double eta_s = sign * (0.2 + 2.0 * u(rng)) * 1e-2;
    const double eta_i = sign * (0.2 + 2.0 * u(rng)) * 1e-2;
    const double eta_p = sign * (0.2 + 2.0 * u(rng)) * 1e-2;
    const double coupling = std::sqrt(eta_s * eta_i);
    // Keep the growth exponent moderate so the gain stays below ~1e4.
    const double dk = (2.0 * u(rng) - 1.0) * 1.5 * coupling;
    auto in = abstract_inputs(eta_s, eta_i, eta_p, dk, n);
    const double g = std::sqrt(std::max(0.0, coupling * coupling - dk * dk)) / 2.0;
    if (g * double(n) > 4.5) {
      const double scale = 4.5 / (g * double(n));
      in = abstract_inputs(eta_s * scale * scale, eta_i * scale * scale, eta_p * scale * scale,
                           dk * scale * scale, n);
    }
    const kt::CoupledModeSystem sys(in);
    const auto s = kt::propagate(sys);
    EXPECT_NEAR(power(s(0, 0)) - power(s(0, 1)), 1.0, 1e-10) << trial;
    EXPECT_NEAR(power(s(1, 1)) - power(s(1, 0)), 1.0, 1e-10) << trial;
    const double analytic = kt::analytic_power_gain(in.kerr.eta_s, in.kerr.eta_i, sys.delta_k(), n);
    EXPECT_NEAR(power(s(0, 0)) / analytic, 1.0, 1e-9) << trial;
  }
}

TEST(Propagate, FieldAndFluxNormalizationShareGains) {
  const auto op = half_flux();
  const auto pump = kt::PumpDrive::from_amplitude(ghz_to_rad_per_s(8.0), 1.2 / kt::wavevector(op, ghz_to_rad_per_s(8.0)));
  const auto sys = kt::CoupledModeSystem::build(op, ghz_to_rad_per_s(9.5), pump, nullptr, 700);
  const auto a = kt::expm(sys.generator() * 700.0).value;
  const auto b = kt::propagate(sys);
  EXPECT_NEAR(power(a(0, 0)) / power(b(0, 0)), 1.0, 1e-10);
  EXPECT_NEAR(power(a(1, 1)) / power(b(1, 1)), 1.0, 1e-10);
}

TEST(AnalyticGain, LimitsOfClosedForm) {
  EXPECT_EQ(kt::analytic_power_gain(0.0, 0.0, 0.01, 700), 1.0);
  const double eta = 0.01;
  const double g = eta / 2.0;
  EXPECT_NEAR(kt::analytic_power_gain(eta, eta, 0.0, 700), std::pow(std::cosh(g * 700), 2),
              1e-12 * std::pow(std::cosh(g * 700), 2));
  // Below threshold the gain is oscillatory but never below one.
  for (int i = 0; i < 100; ++i) {
    EXPECT_GE(kt::analytic_power_gain(eta, eta, 0.02 + 1e-3 * i, 700), 1.0);
  }
  // Continuous through threshold.
  EXPECT_NEAR(kt::analytic_power_gain(eta, eta, eta * (1 - 1e-9), 700),
              kt::analytic_power_gain(eta, eta, eta * (1 + 1e-9), 700), 1e-4);
}

TEST(AnalyticGain, ZeroPumpIsZeroDb) {
  const auto op = half_flux();
  const auto pump = kt::PumpDrive::from_amplitude(ghz_to_rad_per_s(8.0), 0.0);
  EXPECT_EQ(kt::analytic_gain_lossless(op, ghz_to_rad_per_s(7.0), pump, 700), 0.0);
}

TEST(AnalyticGain, MatchesLosslessPropagationOnDeviceGrid) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const auto pump = kt::PumpDrive::from_amplitude(wp, 1.3 / kt::wavevector(op, wp));
  for (int i = 0; i <= 160; ++i) {
    const double ws = ghz_to_rad_per_s(4.0 + 8.0 * i / 160.0);
    const auto sys = kt::CoupledModeSystem::build(op, ws, pump, nullptr, 700);
    const double numeric = 20.0 * std::log10(std::abs(kt::propagate(sys)(0, 0)));
    const double analytic = kt::analytic_gain_lossless(op, ws, pump, 700);
    EXPECT_NEAR(std::pow(10.0, (numeric - analytic) / 10.0), 1.0, 1e-9) << i;
  }
}

TEST(GainProfile, ZeroPumpIsPureLossLine) {
  const auto op = half_flux();
  const auto loss = kt::LossProfile::linear_in_frequency(1.0, 1.0, 20.0);
  const auto pump = kt::PumpDrive::from_amplitude(ghz_to_rad_per_s(8.0), 0.0);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(ghz_to_rad_per_s(4.0 + 0.2 * i));
  const auto prof = kt::gain_profile(op, pump, loss, grid, 700);
  ASSERT_EQ(prof.points.size(), grid.size());
  for (const auto& p : prof.points) {
    EXPECT_NEAR(p.gain_db, loss.s21_db(p.omega_s), 1e-10);
    EXPECT_NEAR(p.net_gain_db, 0.0, 1e-10);
  }
}

TEST(GainProfile, MirrorSymmetricWithFlatLoss) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const kt::LossProfile flat({{ghz_to_rad_per_s(1.0), -3.0}, {ghz_to_rad_per_s(20.0), -3.0}});
  const auto pump = kt::PumpDrive::from_amplitude(wp, 1.1 / kt::wavevector(op, wp));
  std::vector<double> grid;
  for (int i = 1; i < 40; ++i) grid.push_back(wp + ghz_to_rad_per_s(0.1 * i));
  const auto upper = kt::gain_profile(op, pump, flat, grid, 700);
  for (auto& w : grid) w = 2.0 * wp - w;
  const auto lower = kt::gain_profile(op, pump, flat, grid, 700);
  ASSERT_EQ(upper.points.size(), lower.points.size());
  for (std::size_t i = 0; i < upper.points.size(); ++i) {
    EXPECT_NEAR(upper.points[i].gain_db, lower.points[i].gain_db, 1e-9);
  }
}

TEST(GainProfile, LossReducesPeakGain) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const auto pump = kt::PumpDrive::from_amplitude(wp, 0.95 / kt::wavevector(op, wp));
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(ghz_to_rad_per_s(4.0 + 0.04 * i));
  auto peak = [&](const kt::LossProfile& loss) {
    double best = -1e9;
    for (const auto& p : kt::gain_profile(op, pump, loss, grid, 700).points) {
      best = std::max(best, p.gain_db);
    }
    return best;
  };
  const double lossless = peak(kt::LossProfile::lossless(1.0, 20.0));
  for (double slope : {0.01, 0.1, 1.0}) {
    EXPECT_GT(lossless, peak(kt::LossProfile::linear_in_frequency(slope, 1.0, 20.0))) << slope;
  }
}

TEST(GainProfile, SkipsOutOfRangePointsWithDiagnostic) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const auto loss = kt::LossProfile::linear_in_frequency(1.0, 3.0, 13.0);
  const auto pump = kt::PumpDrive::from_amplitude(wp, 1.0 / kt::wavevector(op, wp));
  const auto prof = kt::gain_profile(op, pump, loss, {ghz_to_rad_per_s(2.0), ghz_to_rad_per_s(7.0)}, 700);
  EXPECT_EQ(prof.points.size(), 1u);
  EXPECT_EQ(prof.diagnostics.size(), 1u);
}

TEST(PumpValidity, GuardOnAttenuatedAmplitude) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const double kp = kt::wavevector(op, wp);
  const auto strong = kt::PumpDrive::from_amplitude(wp, 1.05 / kp);
  EXPECT_THROW(kt::check_pump_validity(op, strong, nullptr, 700), kt::ModelValidityError);
  const auto loss = kt::LossProfile::linear_in_frequency(1.0, 1.0, 20.0);
  EXPECT_LT(kt::check_pump_validity(op, strong, &loss, 700), 1.0);
}

TEST(PhaseMatching, ZeroPumpGivesDegeneratePointOnly) {
  const double wp = ghz_to_rad_per_s(8.0);
  const auto roots = kt::phase_matched_frequencies(half_flux(), kt::PumpDrive::from_amplitude(wp, 0.0));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0], wp);
}

TEST(PhaseMatching, MirrorPairsMatchDenseScan) {
  const auto op = half_flux();
  for (double fp : {6.0, 8.0, 10.0}) {
    const double wp = ghz_to_rad_per_s(fp);
    const auto pump = kt::PumpDrive::from_amplitude(wp, 1.5 / kt::wavevector(op, wp));
    const auto roots = kt::phase_matched_frequencies(op, pump);
    ASSERT_EQ(roots.size() % 2, 0u);
    ASSERT_GE(roots.size(), 2u) << fp;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      EXPECT_NEAR(roots[i] + roots[roots.size() - 1 - i], 2 * wp, 1e-3 * wp);
    }

    // Oracle: 1e5-point scan of the total mismatch over (0, 2 wp).
    const double lo = std::max(0.0, 2 * wp - op.omega_j) + 1.0;
    const double hi = std::min(2 * wp, op.omega_j) - 1.0;
    const int n = 100'000;
    const double step = (hi - lo) / n;
    std::vector<double> oracle;
    double prev = kt::total_delta_k(op, lo, pump);
    for (int k = 1; k <= n; ++k) {
      const double w = lo + step * k;
      const double v = kt::total_delta_k(op, w, pump);
      if ((v < 0.0) != (prev < 0.0) && std::abs(w - wp) > 2 * step) oracle.push_back(w);
      prev = v;
    }
    ASSERT_EQ(oracle.size(), roots.size()) << fp;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      EXPECT_NEAR(roots[i], oracle[i], step) << fp;
    }
  }
}

TEST(PhaseMatching, RootsMoveAwayFromPumpWithAmplitude) {
  const auto op = half_flux();
  const double wp = ghz_to_rad_per_s(8.0);
  const double kp = kt::wavevector(op, wp);
  double prev_offset = 0.0;
  for (double drop = 0.4; drop <= 1.6; drop += 0.1) {
    const auto roots = kt::phase_matched_frequencies(op, kt::PumpDrive::from_amplitude(wp, drop / kp));
    ASSERT_EQ(roots.size(), 2u) << drop;
    const double offset = wp - roots[0];
    EXPECT_GT(offset, prev_offset) << drop;
    prev_offset = offset;
  }
}
