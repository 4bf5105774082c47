#pragma once

// Geometry of P(2,R), the cone of positive-definite symmetric 2x2 matrices
// with metric <a, b>_G = 1/2 Tr(G^-1 a G^-1 b).

#include "symflow/holonomy.hpp"
#include "symflow/linalg2.hpp"

namespace symflow {

/// Relative tolerance for positive-definiteness: det > tol * xx * yy.
inline constexpr double kSpdTolerance = 1e-12;

bool is_spd(const Sym2& s);
/// Throws ErrorKind::InvalidState naming `what` when `s` is not SPD.
void require_spd(const Sym2& s, const char* what);

/// Closed-form eigendecomposition. `lo <= hi`; (cos, sin) is the unit
/// eigenvector of `hi`.
struct SymEigen {
  double lo, hi;
  double cos, sin;
};
SymEigen eigen(const Sym2& s);

/// Rebuilds f(lo) v_lo v_lo^T + f(hi) v_hi v_hi^T.
template <class F>
Sym2 spectral_apply(const SymEigen& e, F&& f) {
  const double fh = f(e.hi), fl = f(e.lo);
  const double cc = e.cos * e.cos, ss = e.sin * e.sin, cs = e.cos * e.sin;
  return {fh * cc + fl * ss, (fh - fl) * cs, fh * ss + fl * cc};
}

double spd_inner(const Sym2& g, const Sym2& da, const Sym2& db);
double spd_distance(const Sym2& a, const Sym2& b);

Sym2 sym_log(const Sym2& a);
Sym2 sym_exp(const Sym2& x);
Sym2 sym_sqrt(const Sym2& a);
Sym2 sym_inv_sqrt(const Sym2& a);

/// Point at fraction s along the geodesic from a (s=0) to b (s=1).
Sym2 spd_geodesic(const Sym2& a, const Sym2& b, double s);

/// (u, M) -> e^u M^T M. Requires det M = 1 (relative tolerance 1e-10).
Sym2 phi_map(double u, const Mat2& m);

/// Asymptotic Sol data of a hyperbolic holonomy.
struct SolLimitData {
  Sym2 x;               ///< X with e^X = H^T H
  double slope = 0;     ///< 1/2 Tr(X^2): limit of g_yy / t
  double c = 0;         ///< eigenvalues of H are +-e^{+-c}
  double translation = 0;  ///< min over G of d(G, H^T G H) = 2c
};

/// Rejects non-hyperbolic H.
SolLimitData sol_limit_data(const Holonomy& h);
/// Same for a real hyperbolic gluing matrix (synthetic Sol slices).
SolLimitData sol_limit_data(const Mat2& h);

}  // namespace symflow
