#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kerrtwpa/matrix2.hpp"

namespace kt = kerrtwpa;

TEST(Expm, ZeroIsIdentity) {
  const auto r = kt::expm(kt::Matrix2c::Zero());
  EXPECT_LT((r.value - kt::Matrix2c::Identity()).norm(), 1e-15);
}

TEST(Expm, DiagonalIsElementwise) {
  kt::Matrix2c m = kt::Matrix2c::Zero();
  m(0, 0) = {0.3, -1.2};
  m(1, 1) = {-2.0, 0.7};
  const auto r = kt::expm(m).value;
  EXPECT_LT(std::abs(r(0, 0) - std::exp(m(0, 0))), 1e-14);
  EXPECT_LT(std::abs(r(1, 1) - std::exp(m(1, 1))), 1e-14);
  EXPECT_EQ(r(0, 1), kt::Complex(0.0));
}

TEST(Expm, DefectiveMatrixFallsBackToSeries) {
  kt::Matrix2c m;
  m << kt::Complex(0.5), kt::Complex(2.0), kt::Complex(0.0), kt::Complex(0.5);
  const auto r = kt::expm(m);
  EXPECT_EQ(r.method, kt::ExpmMethod::scaling_and_squaring);
  const double e = std::exp(0.5);
  EXPECT_NEAR(std::abs(r.value(0, 0) - e), 0.0, 1e-12 * e);
  EXPECT_NEAR(std::abs(r.value(0, 1) - 2.0 * e), 0.0, 1e-12 * e);
  EXPECT_NEAR(std::abs(r.value(1, 0)), 0.0, 1e-14);
}

TEST(Expm, EigendecompositionAgreesWithSeries) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    kt::Matrix2c m;
    for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = {u(rng), u(rng)};
    const auto a = kt::expm(m).value;
    const auto b = kt::expm_series(m);
    EXPECT_LT((a - b).norm(), 1e-10 * std::max(1.0, b.norm())) << trial;
  }
}

TEST(Expm, InverseOfNegation) {
  kt::Matrix2c m;
  m << kt::Complex(0.1, -0.4), kt::Complex(0.0, 3.0), kt::Complex(0.0, -2.0),
      kt::Complex(-0.2, 0.4);
  const kt::Matrix2c p = kt::expm(m).value * kt::expm(-m).value;
  EXPECT_LT((p - kt::Matrix2c::Identity()).norm(), 1e-12);
}
