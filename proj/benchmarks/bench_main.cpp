#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "kerrtwpa/constants.hpp"
#include "kerrtwpa/coupled_mode.hpp"
#include "kerrtwpa/dispersion.hpp"
#include "kerrtwpa/least_squares.hpp"
#include "kerrtwpa/matrix2.hpp"
#include "kerrtwpa/microwave_network.hpp"
#include "kerrtwpa/noise.hpp"
#include "kerrtwpa/snail_cell.hpp"
#include "kerrtwpa/spectrum.hpp"
#include "kerrtwpa/transient_lattice.hpp"

namespace kt = kerrtwpa;

namespace {

constexpr double ghz = 2.0 * kt::constants::pi * 1e9;

void expm_2x2(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  std::vector<kt::Matrix2c> ms(256);
  for (auto& m : ms) {
    for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = {d(rng), d(rng)};
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::expm(ms[k++ & 255]));
  }
}
BENCHMARK(expm_2x2);

void operating_point(benchmark::State& state) {
  const auto p = kt::reference_device();
  double flux = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::operating_point(p, flux));
    flux = flux > 6.0 ? 0.1 : flux + 0.01;
  }
}
BENCHMARK(operating_point);

/// Full 8 GHz gain sweep over 4-12 GHz with line loss.
void gain_profile(benchmark::State& state) {
  const auto op = kt::operating_point(kt::reference_device(), kt::constants::pi);
  const double wp = 8.0 * ghz;
  const auto pump = kt::PumpDrive::from_amplitude(wp, 1.4 / kt::wavevector(op, wp));
  const auto loss = kt::LossProfile::linear_in_frequency(1.0, 1.0, 20.0, 39);
  std::vector<double> grid;
  for (int i = 0; i < state.range(0); ++i) {
    grid.push_back((4.0 + 8.0 * i / (state.range(0) - 1.0)) * ghz);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::gain_profile(op, pump, loss, grid, 700));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(gain_profile)->Arg(81)->Arg(321);

void added_noise(benchmark::State& state) {
  const auto op = kt::operating_point(kt::reference_device(), kt::constants::pi);
  const double wp = 8.0 * ghz;
  const auto pump = kt::PumpDrive::from_amplitude(wp, 1.4 / kt::wavevector(op, wp));
  const auto loss = kt::LossProfile::linear_in_frequency(1.0, 1.0, 20.0, 39);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::noise::simulate_added_noise(op, pump, loss, 9.85 * ghz, 700));
  }
}
BENCHMARK(added_noise);

void ladder_transmission(benchmark::State& state) {
  kt::LadderSpec spec;
  spec.modulation_amplitude = 0.1;
  std::vector<double> grid;
  for (int i = 0; i < 391; ++i) grid.push_back((0.5 + 0.05 * i) * ghz);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::transmission(spec, 50.0, grid));
  }
}
BENCHMARK(ladder_transmission)->Unit(benchmark::kMillisecond);

void spectrum_fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.05 * static_cast<double>(i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::spectrum(x, 1e11));
  }
}
BENCHMARK(spectrum_fft)->Arg(1 << 12)->Arg(1 << 16);

/// Short transient run: 200 cells, 12 ns.
void lattice_integration(benchmark::State& state) {
  const auto p = kt::SnailParameters::make(2.19e-6, 0.07, 250e-15, 50e-15, 200);
  const auto lat = kt::build_lattice(p, kt::flux_of_max_g3(p), true);
  kt::TransientConfig cfg;
  cfg.duration = 12e-9;
  cfg.ring_up = 4e-9;
  cfg.ramp = 1e-9;
  cfg.probe_freq = 4e9;
  cfg.probe_power_dbm = -90.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::integrate(lat, cfg));
  }
}
BENCHMARK(lattice_integration)->Unit(benchmark::kMillisecond);

void levenberg_marquardt(benchmark::State& state) {
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-0.7 * x.back()) + 0.2);
  }
  kt::CurveFitProblem prob;
  prob.residual = [x, y](const Eigen::VectorXd& p) -> std::optional<Eigen::VectorXd> {
    Eigen::VectorXd r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = p[0] * std::exp(-p[1] * x[i]) + p[2] - y[i];
    return r;
  };
  prob.initial = Eigen::Vector3d(1.0, 0.2, 0.0);
  prob.lower = Eigen::Vector3d::Constant(-1e9);
  prob.upper = Eigen::Vector3d::Constant(1e9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::least_squares(prob));
  }
}
BENCHMARK(levenberg_marquardt);

}  // namespace

BENCHMARK_MAIN();
