#include "symflow/spd.hpp"

#include <cmath>
#include <sstream>

#include "symflow/error.hpp"

namespace symflow {

bool is_spd(const Sym2& s) {
  return std::isfinite(s.xx) && std::isfinite(s.xy) && std::isfinite(s.yy) &&
         s.xx > 0 && s.yy > 0 && s.det() > kSpdTolerance * s.xx * s.yy;
}

void require_spd(const Sym2& s, const char* what) {
  if (!is_spd(s)) {
    std::ostringstream os;
    os << what << " is not positive-definite: [[" << s.xx << ", " << s.xy
       << "], [" << s.xy << ", " << s.yy << "]]";
    fail(ErrorKind::InvalidState, os.str());
  }
}

SymEigen eigen(const Sym2& s) {
  const double mean = 0.5 * (s.xx + s.yy);
  const double half_diff = 0.5 * (s.xx - s.yy);
  const double radius = std::hypot(half_diff, s.xy);
  const double theta = 0.5 * std::atan2(s.xy, half_diff);
  double hi = mean + radius;
  double lo = mean - radius;
  // Recover the small eigenvalue from the determinant when cancellation bites.
  if (mean > 0 && hi > 0 && lo < 1e-3 * hi) lo = s.det() / hi;
  return {lo, hi, std::cos(theta), std::sin(theta)};
}

double spd_inner(const Sym2& g, const Sym2& da, const Sym2& db) {
  require_spd(g, "base point");
  const Mat2 gi = g.inverse().full();
  return 0.5 * trace_product(gi * da.full(), gi * db.full());
}

Sym2 sym_sqrt(const Sym2& a) {
  require_spd(a, "sym_sqrt argument");
  return spectral_apply(eigen(a), [](double l) { return std::sqrt(l); });
}

Sym2 sym_inv_sqrt(const Sym2& a) {
  require_spd(a, "sym_inv_sqrt argument");
  return spectral_apply(eigen(a), [](double l) { return 1.0 / std::sqrt(l); });
}

Sym2 sym_log(const Sym2& a) {
  require_spd(a, "sym_log argument");
  return spectral_apply(eigen(a), [](double l) { return std::log(l); });
}

Sym2 sym_exp(const Sym2& x) {
  return spectral_apply(eigen(x), [](double l) { return std::exp(l); });
}

double spd_distance(const Sym2& a, const Sym2& b) {
  require_spd(a, "first distance argument");
  require_spd(b, "second distance argument");
  // Eigenvalues of A^-1 B equal those of A^-1/2 B A^-1/2, which is symmetric.
  const Sym2 w = sym_inv_sqrt(a);
  const Sym2 m = congruence(b, w.full());
  const SymEigen e = eigen(m);
  const double l1 = std::log(e.lo), l2 = std::log(e.hi);
  return std::sqrt(0.5 * (l1 * l1 + l2 * l2));
}

Sym2 spd_geodesic(const Sym2& a, const Sym2& b, double s) {
  const Sym2 r = sym_sqrt(a);
  const Sym2 ri = sym_inv_sqrt(a);
  const Sym2 m = congruence(b, ri.full());
  const Sym2 ms = spectral_apply(eigen(m), [s](double l) { return std::pow(l, s); });
  return congruence(ms, r.full());
}

Sym2 phi_map(double u, const Mat2& m) {
  if (std::fabs(m.det() - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "phi_map requires det M = 1, got " << m.det();
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return std::exp(u) * symmetric_part(m.transpose() * m);
}

SolLimitData sol_limit_data(const Mat2& h) {
  const double tr = std::fabs(h.trace());
  if (!(tr > 2.0) || std::fabs(h.det() - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "Sol limit needs a hyperbolic holonomy (|Tr H| > 2, det H = 1); got trace "
       << h.trace() << ", det " << h.det();
    fail(ErrorKind::InvalidArgument, os.str());
  }
  SolLimitData out;
  out.x = sym_log(symmetric_part(h.transpose() * h));
  out.slope = 0.5 * (out.x.xx * out.x.xx + 2 * out.x.xy * out.x.xy +
                     out.x.yy * out.x.yy);
  out.c = std::acosh(0.5 * tr);
  out.translation = 2.0 * out.c;
  return out;
}

SolLimitData sol_limit_data(const Holonomy& h) {
  if (h.classification() != HolonomyClass::Hyperbolic)
    fail(ErrorKind::InvalidArgument,
         "Sol limit needs a hyperbolic holonomy; " + h.str() + " is " +
             std::string(to_string(h.classification())));
  return sol_limit_data(h.matrix());
}

}  // namespace symflow
