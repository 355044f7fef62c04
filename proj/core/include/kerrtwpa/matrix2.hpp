#pragma once

#include <Eigen/Core>
#include <complex>

namespace kerrtwpa {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

/// Which route produced an exponential.
enum class ExpmMethod { eigendecomposition, scaling_and_squaring };

struct ExpmResult {
  Matrix2c value;
  ExpmMethod method;
};

/// exp(m) through the eigendecomposition m = V diag(l1, l2) V^-1. Falls back
/// to scaling-and-squaring when the eigenvector basis is (near-)defective.
ExpmResult expm(const Matrix2c& m);

/// Scaling-and-squaring Taylor exponential with truncation error below
/// 1e-12 relative to the scaled norm. Always available as a cross-check.
Matrix2c expm_series(const Matrix2c& m);

}  // namespace kerrtwpa
