#pragma once

#include <cmath>
#include <numbers>

namespace kerrtwpa::trig {

// Sine and cosine with argument reduction against the double-precision pi,
// so that integer multiples of std::numbers::pi hit the exact zeros and
// extrema of the functions. The loop equations are symmetric about
// phi = pi and several invariants rely on that symmetry being exact.

inline double reduce(double x, long long& quadrant) {
  const double n = std::nearbyint(x / std::numbers::pi);
  quadrant = static_cast<long long>(n);
  return std::fma(-n, std::numbers::pi, x);
}

inline double sin(double x) {
  long long n = 0;
  const double d = reduce(x, n);
  const double s = std::sin(d);
  return (n % 2 == 0) ? s : -s;
}

inline double cos(double x) {
  long long n = 0;
  const double d = reduce(x, n);
  const double c = std::cos(d);
  return (n % 2 == 0) ? c : -c;
}

}  // namespace kerrtwpa::trig
