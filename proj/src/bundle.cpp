#include "symflow/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "symflow/error.hpp"
#include "symflow/spd.hpp"
#include "symflow/stencil.hpp"

namespace symflow {

// Holonomy ----------------------------------------------------------------

std::string_view to_string(HolonomyClass c) {
  switch (c) {
    case HolonomyClass::Elliptic: return "elliptic";
    case HolonomyClass::Parabolic: return "parabolic";
    case HolonomyClass::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

Holonomy::Holonomy(long a, long b, long c, long d) : entries_{a, b, c, d} {
  if (a * d - b * c != 1) {
    std::ostringstream os;
    os << "holonomy must have determinant 1, got " << (a * d - b * c) << " for "
       << str();
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

HolonomyClass Holonomy::classification() const {
  const long t = std::labs(trace());
  if (t > 2) return HolonomyClass::Hyperbolic;
  if (t < 2) return HolonomyClass::Elliptic;
  // |Tr| = 2: only +-I have finite order.
  const bool plus_minus_identity = entries_[1] == 0 && entries_[2] == 0;
  return plus_minus_identity ? HolonomyClass::Elliptic : HolonomyClass::Parabolic;
}

int Holonomy::finite_order() const {
  if (classification() != HolonomyClass::Elliptic) return 0;
  switch (trace()) {
    case 2: return 1;
    case -2: return 2;
    case 0: return 4;
    case 1: return 6;
    case -1: return 3;
  }
  return 0;
}

std::string Holonomy::str() const {
  std::ostringstream os;
  os << "[[" << entries_[0] << ", " << entries_[1] << "], [" << entries_[2] << ", "
     << entries_[3] << "]]";
  return os.str();
}

Mat2 mat_exp(const Mat2& m) {
  const double s = 0.5 * m.trace();
  const Mat2 nil = m - s * Mat2::identity();
  const double delta = -nil.det();  // nil^2 = delta * I
  double ch, sh;
  if (delta > 0) {
    const double r = std::sqrt(delta);
    ch = std::cosh(r);
    sh = std::sinh(r) / r;
  } else if (delta < 0) {
    const double r = std::sqrt(-delta);
    ch = std::cos(r);
    sh = std::sin(r) / r;
  } else {
    ch = 1;
    sh = 1;
  }
  return std::exp(s) * (ch * Mat2::identity() + sh * nil);
}

Mat2 conjugation_log(const Mat2& h) {
  // H and -H act identically by conjugation; pick the one with Tr >= 0.
  const Mat2 p = h.trace() >= 0 ? h : -1.0 * h;
  const double tr = p.trace();
  const Mat2 id = Mat2::identity();
  if (tr > 2 + 1e-14) {
    const double mu = std::acosh(0.5 * tr);
    return (mu / std::sinh(mu)) * (p - std::cosh(mu) * id);
  }
  if (tr < 2 - 1e-14) {
    const double theta = std::acos(0.5 * tr);
    return (theta / std::sin(theta)) * (p - std::cos(theta) * id);
  }
  return p - id;  // unipotent: log(I + N) = N
}

// Bundle fields -------------------------------------------------------------

namespace {

using stencil::d1;
using stencil::d2;

/// Integer power of a 2x2 matrix, negative exponents through the inverse.
Mat2 mat_pow(const Mat2& m, int q) {
  Mat2 base = q >= 0 ? m : m.inverse();
  Mat2 out = Mat2::identity();
  for (int i = 0; i < std::abs(q); ++i) out = out * base;
  return out;
}

/// Per-node derivative data of the fiber metric.
struct NodeJet {
  double g, gy;
  Sym2 G, Gy, Gsemi;  // G;yy = G_yy - 1/2 (g_y / g) G_y
  Sym2 Ginv;
};

template <class F>
void for_each_jet(const BundleState& s, F&& body) {
  const ExtendedBundle e = extend_with_holonomy(s, stencil::kGhost);
  const double h = 1.0 / s.n;
  for (int k = 0; k < s.n; ++k) {
    NodeJet j;
    j.g = e.gyy_at(k);
    j.gy = d1(e.gyy_at(k - 2), e.gyy_at(k - 1), e.gyy_at(k + 1), e.gyy_at(k + 2), h);
    j.G = e.g_at(k);
    const Sym2 &m2 = e.g_at(k - 2), &m1 = e.g_at(k - 1), &p1 = e.g_at(k + 1),
               &p2 = e.g_at(k + 2);
    j.Gy = {d1(m2.xx, m1.xx, p1.xx, p2.xx, h), d1(m2.xy, m1.xy, p1.xy, p2.xy, h),
            d1(m2.yy, m1.yy, p1.yy, p2.yy, h)};
    const Sym2 gyy{d2(m2.xx, m1.xx, j.G.xx, p1.xx, p2.xx, h),
                   d2(m2.xy, m1.xy, j.G.xy, p1.xy, p2.xy, h),
                   d2(m2.yy, m1.yy, j.G.yy, p1.yy, p2.yy, h)};
    j.Gsemi = gyy - (0.5 * j.gy / j.g) * j.Gy;
    j.Ginv = j.G.inverse();
    body(k, j);
  }
}

/// Gy G^-1 Gy (symmetric).
Sym2 sandwich(const NodeJet& j) {
  return symmetric_part(j.Gy.full() * j.Ginv.full() * j.Gy.full());
}

double trace_sq(const NodeJet& j) {
  const Mat2 p = j.Ginv.full() * j.Gy.full();
  return trace_product(p, p);
}

double trace_lin(const NodeJet& j) { return trace_product(j.Ginv.full(), j.Gy.full()); }

}  // namespace

void validate(const BundleState& s) {
  if (s.n < 5 || s.gyy.size() != std::size_t(s.n) || s.G.size() != std::size_t(s.n))
    fail(ErrorKind::InvalidState, "bundle arrays do not match grid size");
  if (std::fabs(s.gluing.det() - 1.0) > 1e-10)
    fail(ErrorKind::InvalidState, "gluing matrix must have determinant 1");
  for (int k = 0; k < s.n; ++k) {
    if (!std::isfinite(s.gyy[k]) || !(s.gyy[k] > 0)) {
      std::ostringstream os;
      os << "g_yy not positive at node " << k << ": " << s.gyy[k];
      fail(ErrorKind::InvalidState, os.str());
    }
    if (!is_spd(s.G[k])) {
      std::ostringstream os;
      os << "G not positive-definite at node " << k;
      fail(ErrorKind::InvalidState, os.str());
    }
  }
}

ExtendedBundle extend_with_holonomy(const BundleState& s, int width) {
  if (width < 1) fail(ErrorKind::InvalidArgument, "extension width must be positive");
  const int n = s.n;
  ExtendedBundle e;
  e.width = width;
  e.gyy.resize(std::size_t(n + 2 * width));
  e.G.resize(std::size_t(n + 2 * width));
  // Cache H^q for the periods touched.
  const int qmin = -((width + n - 1) / n), qmax = (n - 1 + width) / n;
  std::vector<Mat2> pow(std::size_t(qmax - qmin + 1));
  for (int q = qmin; q <= qmax; ++q) pow[std::size_t(q - qmin)] = mat_pow(s.gluing, q);
  for (int k = -width; k < n + width; ++k) {
    const int r = ((k % n) + n) % n;
    const int q = (k - r) / n;
    const std::size_t slot = std::size_t(k + width);
    e.gyy[slot] = s.gyy[std::size_t(r)];
    e.G[slot] = q == 0 ? s.G[std::size_t(r)]
                       : congruence(s.G[std::size_t(r)], pow[std::size_t(q - qmin)]);
  }
  return e;
}

BundleCurvature curvature_bundle(const BundleState& s) {
  validate(s);
  const std::size_t n = std::size_t(s.n);
  BundleCurvature c;
  c.r1212.resize(n);
  c.r_iyjy.resize(n);
  c.ric_fiber.resize(n);
  c.ric_yy.resize(n);
  c.scalar.resize(n);
  c.riem_norm_sq.resize(n);
  for_each_jet(s, [&](int k, const NodeJet& j) {
    const double ginv = 1.0 / j.g;
    const Sym2 sw = sandwich(j);
    const double tsq = trace_sq(j), tl = trace_lin(j);
    const double tsemi = trace_product(j.Ginv.full(), j.Gsemi.full());

    c.r1212[k] = -0.25 * ginv * j.Gy.det();
    const Sym2 q = -0.5 * j.Gsemi + 0.25 * sw;
    c.r_iyjy[k] = q;
    c.ric_fiber[k] = (-0.5 * ginv) * j.Gsemi + (-0.25 * ginv * tl) * j.Gy + (0.5 * ginv) * sw;
    c.ric_yy[k] = -0.5 * tsemi + 0.25 * tsq;
    c.scalar[k] = -ginv * tsemi + 0.75 * ginv * tsq - 0.25 * ginv * tl * tl;

    const double sec = c.r1212[k] / j.G.det();
    const Mat2 gq = j.Ginv.full() * q.full();
    c.riem_norm_sq[k] = 4 * sec * sec + 4 * ginv * ginv * trace_product(gq, gq);
  });
  return c;
}

BundleRate rhs_bundle(const BundleState& s, FlowMode mode) {
  const std::size_t n = std::size_t(s.n);
  BundleRate r{ScalarField(n), std::vector<Sym2>(n)};
  const bool modified = mode == FlowMode::Modified;
  for_each_jet(s, [&](int k, const NodeJet& j) {
    const double ginv = 1.0 / j.g;
    const Sym2 sw = sandwich(j);
    const double tsq = trace_sq(j);
    if (modified) {
      r.dgyy[k] = 0.5 * tsq;
      r.dG[k] = ginv * (j.Gsemi - sw);
    } else {
      const double tsemi = trace_product(j.Ginv.full(), j.Gsemi.full());
      r.dgyy[k] = tsemi - 0.5 * tsq;
      r.dG[k] = ginv * j.Gsemi + (0.5 * ginv * trace_lin(j)) * j.Gy - ginv * sw;
    }
  });
  return r;
}

ScalarField energy_density(const BundleState& s) {
  ScalarField e(std::size_t(s.n));
  for_each_jet(s, [&](int k, const NodeJet& j) { e[k] = trace_sq(j) / j.g; });
  return e;
}

ScalarField fiber_volume(const BundleState& s) {
  ScalarField v(std::size_t(s.n));
  for (int k = 0; k < s.n; ++k) v[k] = std::sqrt(s.G[k].det());
  return v;
}

double integrate(const BundleState& s, const ScalarField& field) {
  double sum = 0;
  for (int k = 0; k < s.n; ++k) sum += field[k] * std::sqrt(s.gyy[k]);
  return sum / s.n;
}

double base_length(const BundleState& s) {
  return integrate(s, ScalarField(std::size_t(s.n), 1.0));
}

double min_spacing_sq(const BundleState& s) {
  const double h = 1.0 / s.n;
  return h * h * *std::min_element(s.gyy.begin(), s.gyy.end());
}

void axpy(BundleState& s, double dt, const BundleRate& r) {
  for (int k = 0; k < s.n; ++k) {
    s.gyy[k] += dt * r.dgyy[k];
    s.G[k] = s.G[k] + dt * r.dG[k];
  }
}

BundleState advance_rk4(const BundleState& s, double dt, FlowMode mode) {
  const BundleRate k1 = rhs_bundle(s, mode);
  BundleState tmp = s;
  axpy(tmp, 0.5 * dt, k1);
  const BundleRate k2 = rhs_bundle(tmp, mode);
  tmp = s;
  axpy(tmp, 0.5 * dt, k2);
  const BundleRate k3 = rhs_bundle(tmp, mode);
  tmp = s;
  axpy(tmp, dt, k3);
  const BundleRate k4 = rhs_bundle(tmp, mode);

  BundleState out = s;
  axpy(out, dt / 6, k1);
  axpy(out, dt / 3, k2);
  axpy(out, dt / 3, k3);
  axpy(out, dt / 6, k4);
  out.time = s.time + dt;
  return out;
}

BundleGaugeProbe lie_gauge_equivalence_probe(const BundleState& s, double dt) {
  validate(s);
  const BundleState a = advance_rk4(s, dt, FlowMode::Modified);
  const BundleState b = advance_rk4(s, dt, FlowMode::Unmodified);
  auto max_riem = [](const BundleState& st) {
    const BundleCurvature c = curvature_bundle(st);
    return std::sqrt(*std::max_element(c.riem_norm_sq.begin(), c.riem_norm_sq.end()));
  };
  auto det_range = [](const BundleState& st) {
    double lo = INFINITY, hi = -INFINITY;
    for (const Sym2& g : st.G) {
      lo = std::min(lo, g.det());
      hi = std::max(hi, g.det());
    }
    return std::pair{lo, hi};
  };
  BundleGaugeProbe r;
  r.length_diff = std::fabs(base_length(a) - base_length(b));
  r.max_riem_diff = std::fabs(max_riem(a) - max_riem(b));
  const auto [alo, ahi] = det_range(a);
  const auto [blo, bhi] = det_range(b);
  r.det_min_diff = std::fabs(alo - blo);
  r.det_max_diff = std::fabs(ahi - bhi);
  return r;
}

BundleState make_sol_slice(int n, double c, double a, double t) {
  BundleState s;
  s.n = n;
  s.gyy.assign(std::size_t(n), 4 * c * c * (t + a));
  s.G.resize(std::size_t(n));
  for (int k = 0; k < n; ++k) {
    const double y = double(k) / n;
    s.G[k] = {std::exp(2 * c * y), 0.0, std::exp(-2 * c * y)};
  }
  s.gluing = {std::exp(c), 0.0, 0.0, std::exp(-c)};
  s.time = t;
  return s;
}

BundleState make_bundle(int n, const Holonomy& h, const BundleInit& init) {
  using std::numbers::pi;
  BundleState s;
  s.n = n;
  s.gluing = h.matrix();
  s.holonomy = h;
  s.time = init.t0;
  s.gyy.resize(std::size_t(n));
  s.G.resize(std::size_t(n));
  const Mat2 gen = conjugation_log(h.matrix());
  for (int k = 0; k < n; ++k) {
    const double y = double(k) / n;
    const double cs = std::cos(2 * pi * y), sn = std::sin(2 * pi * y);
    const Sym2 pert{init.eps * cs + init.delta * cs, 0.5 * init.eps * sn,
                    -init.eps * cs + init.delta * cs};
    const Sym2 shape = sym_exp(pert);
    const Mat2 p = mat_exp(y * gen);
    s.G[k] = congruence(shape, p);
    s.gyy[k] = init.gyy0 * (1 + init.eps_g * cs);
  }
  return s;
}

}  // namespace symflow
