#pragma once

// Seeded generators for the property tests.

#include <cmath>
#include <random>

#include "symflow/linalg2.hpp"

namespace symflow::testgen {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(0x5eed5eedULL);
  return engine;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline long integer(long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng());
}

/// SPD matrix with eigenvalues in [e^-span, e^span] and a random frame.
inline Sym2 spd(double span = 2.0) {
  const double l1 = std::exp(uniform(-span, span));
  const double l2 = std::exp(uniform(-span, span));
  const double th = uniform(0, 3.141592653589793);
  const double c = std::cos(th), s = std::sin(th);
  return {l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
}

inline Sym2 symmetric(double scale = 1.0) {
  return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

/// Product of random elementary shears: an integer matrix with det 1.
inline Mat2 unimodular(int factors = 3) {
  Mat2 m = Mat2::identity();
  for (int k = 0; k < factors; ++k) {
    const double q = double(integer(-2, 2));
    const Mat2 e = (k % 2 == 0) ? Mat2{1, q, 0, 1} : Mat2{1, 0, q, 1};
    m = m * e;
  }
  return m;
}

}  // namespace symflow::testgen
