#include "kerrtwpa/matrix2.hpp"

#include <Eigen/LU>
#include <cmath>

namespace kerrtwpa {

namespace {

// Condition number above which the eigenvector basis is treated as defective.
constexpr double kMaxEigenCondition = 1e4;

double norm1(const Matrix2c& m) {
  return std::max(std::abs(m(0, 0)) + std::abs(m(1, 0)), std::abs(m(0, 1)) + std::abs(m(1, 1)));
}

}  // namespace

Matrix2c expm_series(const Matrix2c& m) {
  const double norm = norm1(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix2c a = m / std::ldexp(1.0, squarings);
  const double a_norm = norm1(a);

  // Taylor terms until the remainder bound a_norm^k/k! * 1/(1-a_norm/(k+1))
  // falls below 1e-17; for a_norm <= 0.5 this takes < 20 terms.
  Matrix2c sum = Matrix2c::Identity();
  Matrix2c term = Matrix2c::Identity();
  double bound = 1.0;
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
    bound *= a_norm / k;
    if (bound < 1e-17) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

ExpmResult expm(const Matrix2c& m) {
  const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const Complex half_trace = 0.5 * (a + d);
  const Complex half_diff = 0.5 * (a - d);
  const Complex mu = std::sqrt(half_diff * half_diff + b * c);
  const Complex l1 = half_trace + mu;
  const Complex l2 = half_trace - mu;

  // Diagonal (or triangular-with-zero-coupling) generators.
  if (b == Complex(0.0) && c == Complex(0.0)) {
    Matrix2c out = Matrix2c::Zero();
    out(0, 0) = std::exp(a);
    out(1, 1) = std::exp(d);
    return {out, ExpmMethod::eigendecomposition};
  }

  // Eigenvectors from whichever off-diagonal row is better scaled.
  Matrix2c v;
  if (std::abs(b) >= std::abs(c)) {
    v << b, b, l1 - a, l2 - a;
  } else {
    v << l1 - d, l2 - d, c, c;
  }
  const Complex det = v.determinant();
  const double scale = v.cwiseAbs2().sum();
  if (det == Complex(0.0) || scale / std::abs(det) > kMaxEigenCondition) {
    return {expm_series(m), ExpmMethod::scaling_and_squaring};
  }
  Matrix2c v_inv;
  v_inv << v(1, 1), -v(0, 1), -v(1, 0), v(0, 0);
  v_inv /= det;
  Matrix2c lambda = Matrix2c::Zero();
  lambda(0, 0) = std::exp(l1);
  lambda(1, 1) = std::exp(l2);
  return {v * lambda * v_inv, ExpmMethod::eigendecomposition};
}

}  // namespace kerrtwpa
