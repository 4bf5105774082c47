#include "symflow/warped.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "symflow/error.hpp"
#include "symflow/stencil.hpp"

namespace symflow {

namespace {

using std::numbers::pi;
using stencil::d1;
using stencil::d2;

/// Pointwise geometry shared by curvature and rate evaluation. Metric
/// components are the coordinate ones (sphere: g11 = a, g22 = f^2).
struct Pointwise {
  ScalarField k, g11, g12, g22;
  ScalarField ux, uy, h11, h12, h22;
  ScalarField grad_sq, lap;
};

struct Derivs {
  ScalarField x, y, xx, yy, xy;
};

Derivs torus_derivs(const ScalarField& f, int n, const stencil::PeriodicIndex& ix) {
  const double h = 1.0 / n;
  const std::size_t nn = std::size_t(n) * n;
  Derivs d{ScalarField(nn), ScalarField(nn), ScalarField(nn), ScalarField(nn),
           ScalarField(nn)};
  auto at = [&](int i, int j) { return f[std::size_t(i) + std::size_t(n) * j]; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = std::size_t(i) + std::size_t(n) * j;
      const double c = f[k];
      const double xm2 = at(ix.m2[i], j), xm1 = at(ix.m1[i], j);
      const double xp1 = at(ix.p1[i], j), xp2 = at(ix.p2[i], j);
      const double ym2 = at(i, ix.m2[j]), ym1 = at(i, ix.m1[j]);
      const double yp1 = at(i, ix.p1[j]), yp2 = at(i, ix.p2[j]);
      d.x[k] = d1(xm2, xm1, xp1, xp2, h);
      d.y[k] = d1(ym2, ym1, yp1, yp2, h);
      d.xx[k] = d2(xm2, xm1, c, xp1, xp2, h);
      d.yy[k] = d2(ym2, ym1, c, yp1, yp2, h);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      auto y_at = [&](int ii) { return d.y[std::size_t(ii) + std::size_t(n) * j]; };
      d.xy[std::size_t(i) + std::size_t(n) * j] =
          d1(y_at(ix.m2[i]), y_at(ix.m1[i]), y_at(ix.p1[i]), y_at(ix.p2[i]), h);
    }
  }
  return d;
}

double det3(double a, double b, double c, double d, double e, double f, double g,
            double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

Pointwise torus_pointwise(const TorusMetric& m, const ScalarField& u) {
  const int n = m.n;
  const std::size_t nn = std::size_t(n) * n;
  const stencil::PeriodicIndex ix(n);
  const Derivs de = torus_derivs(m.g11, n, ix);
  const Derivs df = torus_derivs(m.g12, n, ix);
  const Derivs dg = torus_derivs(m.g22, n, ix);
  const Derivs du = torus_derivs(u, n, ix);

  Pointwise p;
  p.g11 = m.g11;
  p.g12 = m.g12;
  p.g22 = m.g22;
  for (auto* v : {&p.k, &p.ux, &p.uy, &p.h11, &p.h12, &p.h22, &p.grad_sq, &p.lap})
    v->resize(nn);

  for (std::size_t k = 0; k < nn; ++k) {
    const double E = m.g11[k], F = m.g12[k], G = m.g22[k];
    const double Eu = de.x[k], Ev = de.y[k], Fu = df.x[k], Fv = df.y[k];
    const double Gu = dg.x[k], Gv = dg.y[k];
    const double D = E * G - F * F;

    // Brioschi formula for the Gauss curvature.
    const double alpha = -0.5 * de.yy[k] + df.xy[k] - 0.5 * dg.xx[k];
    const double detA = det3(alpha, 0.5 * Eu, Fu - 0.5 * Ev,  //
                             Fv - 0.5 * Gu, E, F,              //
                             0.5 * Gv, F, G);
    const double detB = det3(0.0, 0.5 * Ev, 0.5 * Gu,  //
                             0.5 * Ev, E, F,           //
                             0.5 * Gu, F, G);
    p.k[k] = (detA - detB) / (D * D);

    const double i11 = G / D, i12 = -F / D, i22 = E / D;
    // Christoffel symbols of the first kind, Gamma_{k,ij}.
    const double c1_11 = 0.5 * Eu, c1_12 = 0.5 * Ev, c1_22 = Fv - 0.5 * Gu;
    const double c2_11 = Fu - 0.5 * Ev, c2_12 = 0.5 * Gu, c2_22 = 0.5 * Gv;
    const double s1_11 = i11 * c1_11 + i12 * c2_11, s2_11 = i12 * c1_11 + i22 * c2_11;
    const double s1_12 = i11 * c1_12 + i12 * c2_12, s2_12 = i12 * c1_12 + i22 * c2_12;
    const double s1_22 = i11 * c1_22 + i12 * c2_22, s2_22 = i12 * c1_22 + i22 * c2_22;

    const double ux = du.x[k], uy = du.y[k];
    p.ux[k] = ux;
    p.uy[k] = uy;
    p.h11[k] = du.xx[k] - s1_11 * ux - s2_11 * uy;
    p.h12[k] = du.xy[k] - s1_12 * ux - s2_12 * uy;
    p.h22[k] = du.yy[k] - s1_22 * ux - s2_22 * uy;
    p.grad_sq[k] = i11 * ux * ux + 2 * i12 * ux * uy + i22 * uy * uy;
    p.lap[k] = i11 * p.h11[k] + 2 * i12 * p.h12[k] + i22 * p.h22[k];
  }
  return p;
}

/// Ghost-extended copy: parity +1 reflects evenly, -1 oddly across the poles.
ScalarField sphere_extend(const ScalarField& v, double parity) {
  const int n = int(v.size());
  ScalarField e(std::size_t(n) + 4);
  for (int i = 0; i < n; ++i) e[i + 2] = v[i];
  e[1] = parity * v[0];
  e[0] = parity * v[1];
  e[n + 2] = parity * v[n - 1];
  e[n + 3] = parity * v[n - 2];
  return e;
}

Pointwise sphere_pointwise(const SphereProfile& m, const ScalarField& u) {
  const int n = m.n;
  const double h = pi / n;
  const ScalarField ea = sphere_extend(m.a, 1.0);
  const ScalarField ef = sphere_extend(m.f, -1.0);
  const ScalarField eu = sphere_extend(u, 1.0);

  Pointwise p;
  for (auto* v : {&p.k, &p.g11, &p.g12, &p.g22, &p.ux, &p.uy, &p.h11, &p.h12, &p.h22,
                  &p.grad_sq, &p.lap})
    v->assign(std::size_t(n), 0.0);

  for (int i = 0; i < n; ++i) {
    const int c = i + 2;
    const double a = ea[c], f = ef[c];
    const double ax = d1(ea[c - 2], ea[c - 1], ea[c + 1], ea[c + 2], h);
    const double fx = d1(ef[c - 2], ef[c - 1], ef[c + 1], ef[c + 2], h);
    const double fxx = d2(ef[c - 2], ef[c - 1], f, ef[c + 1], ef[c + 2], h);
    const double ux = d1(eu[c - 2], eu[c - 1], eu[c + 1], eu[c + 2], h);
    const double uxx = d2(eu[c - 2], eu[c - 1], eu[c], eu[c + 1], eu[c + 2], h);

    p.k[i] = -(fxx - fx * ax / (2 * a)) / (a * f);
    p.g11[i] = a;
    p.g22[i] = f * f;
    p.ux[i] = ux;
    p.h11[i] = uxx - ax * ux / (2 * a);
    p.h22[i] = f * fx * ux / a;
    p.grad_sq[i] = ux * ux / a;
    p.lap[i] = p.h11[i] / a + fx * ux / (a * f);
  }
  return p;
}

Pointwise pointwise(const WarpedState& s) {
  if (const auto* t = std::get_if<TorusMetric>(&s.metric)) return torus_pointwise(*t, s.u);
  return sphere_pointwise(std::get<SphereProfile>(s.metric), s.u);
}

/// Tr((g^-1 A)^2) for symmetric A.
double norm_sq(double g11, double g12, double g22, double a11, double a12, double a22) {
  const double D = g11 * g22 - g12 * g12;
  const double i11 = g22 / D, i12 = -g12 / D, i22 = g11 / D;
  const double p11 = i11 * a11 + i12 * a12, p12 = i11 * a12 + i12 * a22;
  const double p21 = i12 * a11 + i22 * a12, p22 = i12 * a12 + i22 * a22;
  return p11 * p11 + 2 * p12 * p21 + p22 * p22;
}

std::string node_name(const SurfaceMetric& m, std::size_t k) {
  std::ostringstream os;
  if (const auto* t = std::get_if<TorusMetric>(&m))
    os << "node (" << k % std::size_t(t->n) << ", " << k / std::size_t(t->n) << ")";
  else
    os << "node " << k;
  return os.str();
}

}  // namespace

Topology topology_of(const SurfaceMetric& m) {
  return std::holds_alternative<TorusMetric>(m) ? Topology::Torus : Topology::SphereRotsym;
}

int grid_size(const SurfaceMetric& m) {
  return std::visit([](const auto& v) { return v.n; }, m);
}

std::size_t node_count(const SurfaceMetric& m) {
  const std::size_t n = std::size_t(grid_size(m));
  return topology_of(m) == Topology::Torus ? n * n : n;
}

int euler_characteristic(Topology t) { return t == Topology::Torus ? 0 : 2; }

std::string_view to_string(Topology t) {
  return t == Topology::Torus ? "torus" : "sphere-rotsym";
}

std::string_view to_string(FlowMode m) {
  return m == FlowMode::Modified ? "modified" : "unmodified";
}

double pole_defect(const SphereProfile& p) {
  const int n = p.n;
  const double h = pi / n;
  auto defect = [h](double f0, double f1, double a0, double a1) {
    const double slope = (27 * f0 - f1) / (12 * h);
    const double a_pole = (9 * a0 - a1) / 8;
    return std::fabs(slope / std::sqrt(a_pole) - 1.0);
  };
  return std::max(defect(p.f[0], p.f[1], p.a[0], p.a[1]),
                  defect(p.f[n - 1], p.f[n - 2], p.a[n - 1], p.a[n - 2]));
}

void validate_metric(const SurfaceMetric& metric) {
  if (const auto* t = std::get_if<TorusMetric>(&metric)) {
    const std::size_t nn = std::size_t(t->n) * t->n;
    if (t->n < 5 || t->g11.size() != nn || t->g12.size() != nn || t->g22.size() != nn)
      fail(ErrorKind::InvalidState, "torus metric arrays do not match grid size");
    for (std::size_t k = 0; k < nn; ++k) {
      const double E = t->g11[k], F = t->g12[k], G = t->g22[k];
      if (!std::isfinite(E) || !std::isfinite(F) || !std::isfinite(G) || !(E > 0) ||
          !(E * G - F * F > 0))
        fail(ErrorKind::InvalidState,
             "metric not positive-definite at " + node_name(metric, k));
    }
    return;
  }
  const auto& p = std::get<SphereProfile>(metric);
  if (p.n < 5 || p.a.size() != std::size_t(p.n) || p.f.size() != std::size_t(p.n))
    fail(ErrorKind::InvalidState, "sphere profile arrays do not match grid size");
  for (std::size_t k = 0; k < p.a.size(); ++k) {
    if (!std::isfinite(p.a[k]) || !std::isfinite(p.f[k]) || !(p.a[k] > 0) || !(p.f[k] > 0))
      fail(ErrorKind::InvalidState,
           "sphere profile not positive at " + node_name(metric, k));
  }
  const double defect = pole_defect(p);
  if (!(defect <= kPoleTolerance)) {
    std::ostringstream os;
    os << "pole regularity violated: |f'/sqrt(a) - 1| = " << defect;
    fail(ErrorKind::InvalidState, os.str());
  }
}

void validate(const WarpedState& s) {
  validate_metric(s.metric);
  if (s.u.size() != node_count(s.metric))
    fail(ErrorKind::InvalidState, "warp field size does not match grid");
  for (std::size_t k = 0; k < s.u.size(); ++k)
    if (!std::isfinite(s.u[k]))
      fail(ErrorKind::InvalidState, "warp function not finite at " + node_name(s.metric, k));
}

WarpedCurvature curvature_warped(const WarpedState& s) {
  validate(s);
  const Pointwise p = pointwise(s);
  const std::size_t nn = p.k.size();
  WarpedCurvature c;
  for (auto* v : {&c.r_m, &c.r_n, &c.riem_norm_sq, &c.ric11, &c.ric12, &c.ric22,
                  &c.ric_thth, &c.grad_u_sq, &c.lap_u, &c.hess_norm_sq})
    v->resize(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    const double a11 = p.h11[k] + p.ux[k] * p.ux[k];
    const double a12 = p.h12[k] + p.ux[k] * p.uy[k];
    const double a22 = p.h22[k] + p.uy[k] * p.uy[k];
    const double K = p.k[k];
    c.r_m[k] = 2 * K;
    c.r_n[k] = 2 * K - 2 * p.lap[k] - 2 * p.grad_sq[k];
    c.riem_norm_sq[k] =
        4 * K * K + 2 * norm_sq(p.g11[k], p.g12[k], p.g22[k], a11, a12, a22);
    c.ric11[k] = K * p.g11[k] - a11;
    c.ric12[k] = K * p.g12[k] - a12;
    c.ric22[k] = K * p.g22[k] - a22;
    c.ric_thth[k] = -std::exp(2 * s.u[k]) * (p.lap[k] + p.grad_sq[k]);
    c.grad_u_sq[k] = p.grad_sq[k];
    c.lap_u[k] = p.lap[k];
    c.hess_norm_sq[k] = norm_sq(p.g11[k], p.g12[k], p.g22[k], p.h11[k], p.h12[k], p.h22[k]);
  }
  return c;
}

ScalarField gauss_curvature(const SurfaceMetric& m) {
  WarpedState s{m, ScalarField(node_count(m), 0.0), 0.0};
  validate_metric(m);
  return pointwise(s).k;
}

ScalarField gradient_norm_sq(const SurfaceMetric& m, const ScalarField& f) {
  WarpedState s{m, f, 0.0};
  validate(s);
  return pointwise(s).grad_sq;
}

WarpedRate rhs_warped(const WarpedState& s, FlowMode mode) {
  const Pointwise p = pointwise(s);
  const std::size_t nn = p.k.size();
  const bool unmodified = mode == FlowMode::Unmodified;
  WarpedRate r;
  r.du.resize(nn);
  for (std::size_t k = 0; k < nn; ++k)
    r.du[k] = p.lap[k] + (unmodified ? p.grad_sq[k] : 0.0);

  auto metric_rate = [&](std::size_t k, double g, double uiuj, double hess) {
    return -2 * p.k[k] * g + 2 * uiuj + (unmodified ? 2 * hess : 0.0);
  };

  if (std::holds_alternative<TorusMetric>(s.metric)) {
    TorusMetric dg{int(std::get<TorusMetric>(s.metric).n), ScalarField(nn),
                   ScalarField(nn), ScalarField(nn)};
    for (std::size_t k = 0; k < nn; ++k) {
      dg.g11[k] = metric_rate(k, p.g11[k], p.ux[k] * p.ux[k], p.h11[k]);
      dg.g12[k] = metric_rate(k, p.g12[k], p.ux[k] * p.uy[k], p.h12[k]);
      dg.g22[k] = metric_rate(k, p.g22[k], p.uy[k] * p.uy[k], p.h22[k]);
    }
    r.dg = std::move(dg);
  } else {
    const auto& prof = std::get<SphereProfile>(s.metric);
    SphereProfile dg{prof.n, ScalarField(nn), ScalarField(nn)};
    for (std::size_t k = 0; k < nn; ++k) {
      dg.a[k] = metric_rate(k, p.g11[k], p.ux[k] * p.ux[k], p.h11[k]);
      // d(f^2)/dt = 2 f df/dt
      dg.f[k] = metric_rate(k, p.g22[k], 0.0, p.h22[k]) / (2 * prof.f[k]);
    }
    r.dg = std::move(dg);
  }
  return r;
}

double integrate(const SurfaceMetric& m, const ScalarField& field) {
  if (const auto* t = std::get_if<TorusMetric>(&m)) {
    const double h = 1.0 / t->n;
    double sum = 0;
    for (std::size_t k = 0; k < field.size(); ++k)
      sum += std::sqrt(t->g11[k] * t->g22[k] - t->g12[k] * t->g12[k]) * field[k];
    return sum * h * h;
  }
  const auto& p = std::get<SphereProfile>(m);
  const int n = p.n;
  const double h = pi / n;
  ScalarField w(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) w[i] = std::sqrt(p.a[i]) * p.f[i] * field[i];
  double mid = 0;
  for (double v : w) mid += v;
  mid *= h;
  // Midpoint rule plus the Euler-Maclaurin endpoint term; the integrand is
  // odd about each pole, so its pole slopes come from the first two nodes.
  const double slope0 = (27 * w[0] - w[1]) / (12 * h);
  const double slope_pi = (27 * w[n - 1] - w[n - 2]) / (12 * h);
  return 2 * pi * (mid - h * h / 24 * (slope0 + slope_pi));
}

double area(const SurfaceMetric& m) { return integrate(m, ScalarField(node_count(m), 1.0)); }

double gauss_bonnet(const SurfaceMetric& m) {
  ScalarField k = gauss_curvature(m);
  for (double& v : k) v *= 2;
  return integrate(m, k);
}

double min_spacing_sq(const SurfaceMetric& m) {
  if (const auto* t = std::get_if<TorusMetric>(&m)) {
    const double h = 1.0 / t->n;
    double lo = INFINITY;
    for (std::size_t k = 0; k < t->g11.size(); ++k) {
      const double mean = 0.5 * (t->g11[k] + t->g22[k]);
      const double rad = std::hypot(0.5 * (t->g11[k] - t->g22[k]), t->g12[k]);
      lo = std::min(lo, mean - rad);
    }
    return h * h * lo;
  }
  const auto& p = std::get<SphereProfile>(m);
  const double h = pi / p.n;
  return h * h * *std::min_element(p.a.begin(), p.a.end());
}

void axpy(WarpedState& s, double dt, const WarpedRate& r) {
  auto add = [dt](ScalarField& y, const ScalarField& x) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += dt * x[k];
  };
  if (auto* t = std::get_if<TorusMetric>(&s.metric)) {
    const auto& d = std::get<TorusMetric>(r.dg);
    add(t->g11, d.g11);
    add(t->g12, d.g12);
    add(t->g22, d.g22);
  } else {
    auto& p = std::get<SphereProfile>(s.metric);
    const auto& d = std::get<SphereProfile>(r.dg);
    add(p.a, d.a);
    add(p.f, d.f);
  }
  add(s.u, r.du);
}

WarpedState advance_rk4(const WarpedState& s, double dt, FlowMode mode) {
  const WarpedRate k1 = rhs_warped(s, mode);
  WarpedState tmp = s;
  axpy(tmp, 0.5 * dt, k1);
  const WarpedRate k2 = rhs_warped(tmp, mode);
  tmp = s;
  axpy(tmp, 0.5 * dt, k2);
  const WarpedRate k3 = rhs_warped(tmp, mode);
  tmp = s;
  axpy(tmp, dt, k3);
  const WarpedRate k4 = rhs_warped(tmp, mode);

  WarpedState out = s;
  axpy(out, dt / 6, k1);
  axpy(out, dt / 3, k2);
  axpy(out, dt / 3, k3);
  axpy(out, dt / 6, k4);
  out.time = s.time + dt;
  return out;
}

GaugeProbeReport lie_gauge_equivalence_probe(const WarpedState& s, double dt) {
  validate(s);
  const WarpedState a = advance_rk4(s, dt, FlowMode::Modified);
  const WarpedState b = advance_rk4(s, dt, FlowMode::Unmodified);
  auto max_riem = [](const WarpedState& st) {
    const WarpedCurvature c = curvature_warped(st);
    return std::sqrt(*std::max_element(c.riem_norm_sq.begin(), c.riem_norm_sq.end()));
  };
  GaugeProbeReport r;
  r.volume_diff = std::fabs(area(a.metric) - area(b.metric));
  r.max_riem_diff = std::fabs(max_riem(a) - max_riem(b));
  r.total_curvature_diff = std::fabs(gauss_bonnet(a.metric) - gauss_bonnet(b.metric));
  return r;
}

WarpedState make_flat_torus(int n, double side, double amplitude, double u0) {
  const std::size_t nn = std::size_t(n) * n;
  TorusMetric m{n, ScalarField(nn, side * side), ScalarField(nn, 0.0),
                ScalarField(nn, side * side)};
  ScalarField u(nn);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      u[std::size_t(i) + std::size_t(n) * j] = u0 + amplitude * std::cos(2 * pi * i / n);
  return {std::move(m), std::move(u), 0.0};
}

WarpedState make_round_sphere(int n, double r, double amplitude, double u0) {
  SphereProfile p{n, ScalarField(std::size_t(n)), ScalarField(std::size_t(n))};
  ScalarField u(static_cast<std::size_t>(n));
  const double h = pi / n;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    p.a[i] = r * r;
    p.f[i] = r * std::sin(x);
    u[i] = u0 + amplitude * std::cos(x);
  }
  return {std::move(p), std::move(u), 0.0};
}

WarpedState make_bumpy_torus(int n, double amp) {
  const std::size_t nn = std::size_t(n) * n;
  TorusMetric m{n, ScalarField(nn), ScalarField(nn, 0.0), ScalarField(nn)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double phi = amp * std::sin(2 * pi * i / n) * std::cos(2 * pi * j / n);
      const std::size_t k = std::size_t(i) + std::size_t(n) * j;
      m.g11[k] = m.g22[k] = std::exp(2 * phi);
    }
  return {std::move(m), ScalarField(nn, 0.0), 0.0};
}

}  // namespace symflow
