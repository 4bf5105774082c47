#pragma once

// Small fixed-size 2x2 algebra used in the inner loops of the bundle solver.
// Everything here is inline and allocation free.

#include <cmath>

namespace symflow {

/// General real 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
};

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0, xy = 0, yy = 0;

  static constexpr Sym2 identity() { return {1, 0, 1}; }

  constexpr double det() const { return xx * yy - xy * xy; }
  constexpr double trace() const { return xx + yy; }
  constexpr Mat2 full() const { return {xx, xy, xy, yy}; }
  Sym2 inverse() const {
    const double k = 1.0 / det();
    return {yy * k, -xy * k, xx * k};
  }
  constexpr bool positive_definite(double tol = 0.0) const {
    return xx > tol && det() > tol * tol;
  }
  friend constexpr Sym2 operator+(const Sym2& x, const Sym2& y) {
    return {x.xx + y.xx, x.xy + y.xy, x.yy + y.yy};
  }
  friend constexpr Sym2 operator-(const Sym2& x, const Sym2& y) {
    return {x.xx - y.xx, x.xy - y.xy, x.yy - y.yy};
  }
  friend constexpr Sym2 operator*(double s, const Sym2& x) {
    return {s * x.xx, s * x.xy, s * x.yy};
  }
};

/// Symmetric part of a general matrix.
constexpr Sym2 symmetric_part(const Mat2& m) {
  return {m.a, 0.5 * (m.b + m.c), m.d};
}

/// M^T S M, returned symmetrized.
constexpr Sym2 congruence(const Sym2& s, const Mat2& m) {
  return symmetric_part(m.transpose() * s.full() * m);
}

/// Tr(X Y) for general 2x2 matrices.
constexpr double trace_product(const Mat2& x, const Mat2& y) {
  return x.a * y.a + x.b * y.c + x.c * y.b + x.d * y.d;
}

/// Frobenius-type max-abs entry difference, used for tolerance checks.
inline double max_abs_diff(const Sym2& x, const Sym2& y) {
  return std::fmax(std::fabs(x.xx - y.xx),
                   std::fmax(std::fabs(x.xy - y.xy), std::fabs(x.yy - y.yy)));
}

}  // namespace symflow
