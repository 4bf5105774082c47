#include "symflow/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "symflow/error.hpp"
#include "symflow/spd.hpp"
#include "symflow/stencil.hpp"

namespace symflow {

namespace {

using std::numbers::pi;

std::pair<double, double> extrema(const ScalarField& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

double max_of(const ScalarField& v) { return *std::max_element(v.begin(), v.end()); }

/// Shortest closed coordinate curve on the base.
double shortest_loop(const SurfaceMetric& metric) {
  if (const auto* p = std::get_if<SphereProfile>(&metric)) {
    double sum = 0;
    for (double a : p->a) sum += std::sqrt(a);
    return sum * pi / p->n;
  }
  const auto& m = std::get<TorusMetric>(metric);
  const int n = m.n;
  double best = INFINITY;
  for (int line = 0; line < n; ++line) {
    double along_x = 0, along_y = 0;
    for (int k = 0; k < n; ++k) {
      along_x += std::sqrt(m.g11[std::size_t(k) + std::size_t(n) * line]);
      along_y += std::sqrt(m.g22[std::size_t(line) + std::size_t(n) * k]);
    }
    best = std::min({best, along_x / n, along_y / n});
  }
  return best;
}

}  // namespace

DiagnosticsRecord basic_functionals(const WarpedState& s) {
  const WarpedCurvature c = curvature_warped(s);
  const std::size_t nodes = c.r_m.size();
  ScalarField sfield(nodes);
  for (std::size_t k = 0; k < nodes; ++k) sfield[k] = c.r_m[k] - c.grad_u_sq[k];

  DiagnosticsRecord r;
  r.t = s.time;
  r.V = area(s.metric);
  r.E = integrate(s.metric, c.grad_u_sq);
  r.min_S = *std::min_element(sfield.begin(), sfield.end());
  r.max_gradu_sq = max_of(c.grad_u_sq);
  r.max_riem = std::sqrt(max_of(c.riem_norm_sq));
  r.gauss_bonnet = integrate(s.metric, c.r_m);
  r.L = shortest_loop(s.metric);
  std::tie(r.u_min, r.u_max) = extrema(s.u);
  r.detG_min = std::exp(2 * r.u_min);
  r.detG_max = std::exp(2 * r.u_max);
  r.max_energy_density = 0;
  return r;
}

DiagnosticsRecord basic_functionals(const BundleState& s) {
  const BundleCurvature c = curvature_bundle(s);
  const ScalarField ecal = energy_density(s);
  const ScalarField vol = fiber_volume(s);
  const std::size_t n = std::size_t(s.n);

  ScalarField u(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = std::log(vol[k]);
  const stencil::PeriodicIndex ix(s.n);
  double grad_max = 0;
  for (int k = 0; k < s.n; ++k) {
    // ln sqrt(det G) is periodic because det H = 1.
    const double uy = stencil::periodic_d1(u, ix, k, 1.0 / s.n);
    grad_max = std::max(grad_max, uy * uy / s.gyy[std::size_t(k)]);
  }

  DiagnosticsRecord r;
  r.t = s.time;
  r.V = integrate(s, vol);
  r.E = integrate(s, ecal);
  r.min_S = *std::min_element(c.scalar.begin(), c.scalar.end());
  r.max_gradu_sq = grad_max;
  r.max_riem = std::sqrt(max_of(c.riem_norm_sq));
  r.gauss_bonnet = 0;
  r.L = base_length(s);
  std::tie(r.u_min, r.u_max) = extrema(u);
  r.detG_min = std::exp(2 * r.u_min);
  r.detG_max = std::exp(2 * r.u_max);
  r.max_energy_density = max_of(ecal);
  return r;
}

double dissipation(const WarpedState& s) {
  const WarpedCurvature c = curvature_warped(s);
  ScalarField d(c.lap_u.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = c.grad_u_sq[k] * c.grad_u_sq[k] + 2 * c.lap_u[k] * c.lap_u[k];
  return integrate(s.metric, d);
}

double w_functional(const WarpedState& s, const ScalarField& f, double tau) {
  if (!(tau > 0)) fail(ErrorKind::InvalidArgument, "tau must be positive");
  if (f.size() != s.u.size()) fail(ErrorKind::InvalidArgument, "f has the wrong size");
  const WarpedCurvature c = curvature_warped(s);
  const double norm = 1.0 / (4 * pi * tau);

  // Shift f so that the weight has unit mass.
  const double f_ref = *std::min_element(f.begin(), f.end());
  ScalarField w(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) w[k] = norm * std::exp(-(f[k] - f_ref));
  const double shift = std::log(integrate(s.metric, w)) - f_ref;

  ScalarField fs(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) fs[k] = f[k] + shift;
  const ScalarField gf = gradient_norm_sq(s.metric, fs);
  ScalarField integrand(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double bracket = tau * (gf[k] + c.r_m[k] - c.grad_u_sq[k]) + fs[k] - 2;
    integrand[k] = bracket * norm * std::exp(-fs[k]);
  }
  return integrate(s.metric, integrand);
}

// Conjugate heat ------------------------------------------------------------

ConjugateHeatField uniform_terminal(const BundleState& s) {
  return {s.time, ScalarField(std::size_t(s.n), 1.0 / base_length(s))};
}

double conjugate_heat_mass(const BundleState& s, const ConjugateHeatField& f) {
  return integrate(s, f.u);
}

ScalarField conjugate_heat_potential(const ConjugateHeatField& f) {
  if (!(f.time > 0)) fail(ErrorKind::InvalidArgument, "potential needs t > 0");
  ScalarField out(f.u.size());
  const double offset = 0.5 * std::log(4 * pi * f.time);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -std::log(f.u[k]) - offset;
  return out;
}

namespace {

/// -d_y(d_y(w / sqrt g) / sqrt g) in flux form with fourth-order half-node
/// stencils. `root` holds sqrt(g_yy) at nodes.
void heat_rate(const ScalarField& w, const ScalarField& root, double h, ScalarField& out,
               ScalarField& scratch_u, ScalarField& flux) {
  const int n = int(w.size());
  auto wrap = [n](int k) { return std::size_t(((k % n) + n) % n); };
  for (int k = 0; k < n; ++k) scratch_u[std::size_t(k)] = w[std::size_t(k)] / root[std::size_t(k)];
  // flux[k] lives at k + 1/2.
  for (int k = 0; k < n; ++k) {
    const double uy = (-scratch_u[wrap(k + 2)] + 27 * scratch_u[wrap(k + 1)] -
                       27 * scratch_u[wrap(k)] + scratch_u[wrap(k - 1)]) /
                      (24 * h);
    const double r = (-root[wrap(k - 1)] + 9 * root[wrap(k)] + 9 * root[wrap(k + 1)] -
                      root[wrap(k + 2)]) /
                     16;
    flux[std::size_t(k)] = uy / r;
  }
  for (int k = 0; k < n; ++k) {
    const double div = (-flux[wrap(k + 1)] + 27 * flux[wrap(k)] - 27 * flux[wrap(k - 1)] +
                        flux[wrap(k - 2)]) /
                       (24 * h);
    out[std::size_t(k)] = -div;
  }
}

}  // namespace

std::vector<ConjugateHeatField> conjugate_heat_backward(
    const std::vector<BundleState>& snapshots, const ConjugateHeatField& terminal,
    double cfl) {
  if (snapshots.empty()) fail(ErrorKind::InvalidArgument, "no snapshots");
  const int n = snapshots.front().n;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    if (snapshots[i].n != n) fail(ErrorKind::InvalidArgument, "snapshot grids differ");
    if (i > 0 && !(snapshots[i].time > snapshots[i - 1].time))
      fail(ErrorKind::InvalidArgument, "snapshot times must increase");
  }
  if (terminal.u.size() != std::size_t(n))
    fail(ErrorKind::InvalidArgument, "terminal field has the wrong size");
  if (!(cfl > 0)) fail(ErrorKind::InvalidArgument, "cfl must be positive");

  const double h = 1.0 / n;
  const std::size_t nn = std::size_t(n);
  auto roots = [&](const BundleState& s) {
    ScalarField r(nn);
    for (std::size_t k = 0; k < nn; ++k) r[k] = std::sqrt(s.gyy[k]);
    return r;
  };

  std::vector<ConjugateHeatField> out(snapshots.size());
  ScalarField root_hi = roots(snapshots.back());
  ScalarField w(nn);
  for (std::size_t k = 0; k < nn; ++k) w[k] = terminal.u[k] * root_hi[k];
  out.back() = {snapshots.back().time, terminal.u};

  ScalarField k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn), root(nn), su(nn), flux(nn);
  for (std::size_t i = snapshots.size() - 1; i-- > 0;) {
    const BundleState& lo = snapshots[i];
    const BundleState& hi = snapshots[i + 1];
    const ScalarField root_lo = roots(lo);
    const double span = hi.time - lo.time;
    const double gmin = std::min(*std::min_element(lo.gyy.begin(), lo.gyy.end()),
                                 *std::min_element(hi.gyy.begin(), hi.gyy.end()));
    const double dt_max = cfl * h * h * gmin;
    const int steps = std::max(1, int(std::ceil(span / dt_max)));
    const double dt = span / steps;

    // sqrt(g_yy) interpolated linearly in g_yy between the two snapshots.
    auto root_at = [&](double t) {
      const double theta = (t - lo.time) / span;
      for (std::size_t k = 0; k < nn; ++k)
        root[k] = std::sqrt((1 - theta) * lo.gyy[k] + theta * hi.gyy[k]);
      return std::cref(root);
    };
    auto rate = [&](double t, const ScalarField& x, ScalarField& r) {
      heat_rate(x, root_at(t), h, r, su, flux);
    };

    double t = hi.time;
    for (int step = 0; step < steps; ++step) {
      // Integrate with a negative step from t to t - dt.
      const double d = -dt;
      rate(t, w, k1);
      for (std::size_t k = 0; k < nn; ++k) tmp[k] = w[k] + 0.5 * d * k1[k];
      rate(t + 0.5 * d, tmp, k2);
      for (std::size_t k = 0; k < nn; ++k) tmp[k] = w[k] + 0.5 * d * k2[k];
      rate(t + 0.5 * d, tmp, k3);
      for (std::size_t k = 0; k < nn; ++k) tmp[k] = w[k] + d * k3[k];
      rate(t + d, tmp, k4);
      for (std::size_t k = 0; k < nn; ++k)
        w[k] += d / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
      t = step + 1 == steps ? lo.time : t + d;
    }

    ConjugateHeatField f{lo.time, ScalarField(nn)};
    for (std::size_t k = 0; k < nn; ++k) {
      if (!(w[k] > 0)) {
        std::ostringstream os;
        os << "conjugate heat solution lost positivity at snapshot " << i << " (t = "
           << lo.time << ", node " << k << ")";
        fail(ErrorKind::Numerical, os.str());
      }
      f.u[k] = w[k] / root_lo[k];
    }
    out[i] = std::move(f);
  }
  return out;
}

double w_plus(const BundleState& s, const ScalarField& f, double t) {
  if (!(t > 0)) fail(ErrorKind::InvalidArgument, "W+ needs t > 0");
  if (f.size() != std::size_t(s.n)) fail(ErrorKind::InvalidArgument, "f has the wrong size");
  const ScalarField ecal = energy_density(s);
  const stencil::PeriodicIndex ix(s.n);
  const double norm = 1.0 / std::sqrt(4 * pi * t);
  ScalarField integrand(f.size());
  for (int k = 0; k < s.n; ++k) {
    const std::size_t kk = std::size_t(k);
    const double fy = stencil::periodic_d1(f, ix, k, 1.0 / s.n);
    const double grad = fy * fy / s.gyy[kk];
    const double bracket = t * (grad - 0.25 * ecal[kk]) - f[kk] + 1;
    integrand[kk] = bracket * norm * std::exp(-f[kk]);
  }
  return integrate(s, integrand);
}

double sol_geodesic_residual(const BundleState& s) {
  validate(s);
  const double tr = std::fabs(s.gluing.trace());
  if (!(tr > 2)) fail(ErrorKind::InvalidArgument, "Sol residual needs hyperbolic gluing");
  const double translation = 2 * std::acosh(0.5 * tr);
  const Sym2 g0 = s.G.front();
  const Sym2 g1 = congruence(g0, s.gluing);

  // Normalized arclength s(y_k) by a fourth-order cumulative rule.
  const int n = s.n;
  ScalarField root(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) root[std::size_t(k)] = std::sqrt(s.gyy[std::size_t(k)]);
  auto at = [&](int k) { return root[std::size_t(((k % n) + n) % n)]; };
  ScalarField arc(std::size_t(n) + 1, 0.0);
  for (int k = 0; k < n; ++k)
    arc[std::size_t(k) + 1] = arc[std::size_t(k)] + (-at(k - 1) + 13 * at(k) +
                                                     13 * at(k + 1) - at(k + 2)) /
                                                        (24.0 * n);
  const double total = arc.back();

  double worst = 0;
  for (int k = 0; k < n; ++k) {
    const Sym2 target = spd_geodesic(g0, g1, arc[std::size_t(k)] / total);
    worst = std::max(worst, spd_distance(s.G[std::size_t(k)], target));
  }
  return worst + std::fabs(spd_distance(g0, g1) - translation);
}

}  // namespace symflow
