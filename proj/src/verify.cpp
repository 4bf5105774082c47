#include "symflow/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "symflow/error.hpp"
#include "symflow/fit.hpp"
#include "symflow/spd.hpp"

namespace symflow {

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

std::string_view to_string(Family f) { return f == Family::Warped ? "warped" : "bundle"; }

std::string_view to_string(FitKind k) {
  switch (k) {
    case FitKind::ExpFlat: return "exp-flat";
    case FitKind::SolPower: return "sol-power";
    case FitKind::GrowthExponent: return "growth-exponent";
    case FitKind::CurvatureDecay: return "curvature-decay";
  }
  return "?";
}

FitKind parse_fit_kind(std::string_view s) {
  for (FitKind k : {FitKind::ExpFlat, FitKind::SolPower, FitKind::GrowthExponent,
                    FitKind::CurvatureDecay})
    if (s == to_string(k)) return k;
  fail(ErrorKind::Config, "unknown fit kind '" + std::string(s) + "'");
}

bool VerificationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return !c.diagnostic && c.status == CheckStatus::Fail;
  });
}

const CheckResult* VerificationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

using std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Tracks the worst margin of a check, where a margin below -slack fails.
class Scan {
 public:
  explicit Scan(std::string name, bool diagnostic = false) {
    result_.name = std::move(name);
    result_.diagnostic = diagnostic;
  }

  void see(double margin, double slack, double t) {
    ++seen_;
    if (margin < worst_) {
      worst_ = margin;
      result_.time_of_worst = t;
    }
    if (margin < -slack) ++failures_;
  }
  void skip() { ++skipped_; }

  CheckResult finish(std::string extra = {}) {
    std::ostringstream os;
    if (seen_ == 0) {
      result_.status = CheckStatus::NotApplicable;
      result_.worst_margin = 0;
      os << "no samples in range";
    } else {
      result_.status = failures_ == 0 ? CheckStatus::Pass : CheckStatus::Fail;
      result_.worst_margin = worst_;
      os << seen_ << " samples";
      if (failures_) os << ", " << failures_ << " outside tolerance";
    }
    if (skipped_) os << ", " << skipped_ << " below round-off resolution";
    if (!extra.empty()) os << "; " << extra;
    result_.detail = os.str();
    return result_;
  }

 private:
  CheckResult result_;
  double worst_ = INFINITY;
  std::size_t seen_ = 0, skipped_ = 0, failures_ = 0;
};

CheckResult not_applicable(std::string name, std::string why, bool diagnostic = false) {
  CheckResult r;
  r.name = std::move(name);
  r.status = CheckStatus::NotApplicable;
  r.diagnostic = diagnostic;
  r.detail = std::move(why);
  return r;
}

void require_ordered(const std::vector<DiagnosticsRecord>& rs) {
  if (rs.empty()) fail(ErrorKind::InvalidArgument, "no diagnostics records");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& r = rs[i];
    const double vals[] = {r.t, r.dt, r.V, r.E, r.min_S, r.max_gradu_sq, r.max_riem,
                           r.gauss_bonnet, r.L, r.detG_min, r.detG_max,
                           r.max_energy_density, r.u_min, r.u_max};
    for (double v : vals)
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite diagnostics value in record " << i;
        fail(ErrorKind::InvalidArgument, os.str());
      }
    if (i > 0 && !(r.t > rs[i - 1].t)) {
      std::ostringstream os;
      os << "record times not strictly increasing at record " << i;
      fail(ErrorKind::InvalidArgument, os.str());
    }
  }
}

// Shared checks -------------------------------------------------------------

/// Pair of extrema where `hi` must not increase and `lo` must not decrease.
template <class Hi, class Lo>
CheckResult extrema_monotone(std::string name, const std::vector<DiagnosticsRecord>& rs,
                             Hi hi, Lo lo, double slack) {
  Scan scan(std::move(name));
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const double m = std::min(hi(rs[i - 1]) - hi(rs[i]), lo(rs[i]) - lo(rs[i - 1]));
    scan.see(m, slack, rs[i].t);
  }
  std::ostringstream os;
  os << "slack " << slack;
  return scan.finish(os.str());
}

/// Consecutive samples of q(t) nonincreasing for t - origin >= t_min.
template <class Q>
CheckResult nonincreasing_after(std::string name, const std::vector<DiagnosticsRecord>& rs,
                                double origin, double t_min, double rel, Q q,
                                bool diagnostic = false) {
  Scan scan(std::move(name), diagnostic);
  for (std::size_t i = 1; i < rs.size(); ++i) {
    if (rs[i - 1].t - origin < t_min) continue;
    const double a = q(rs[i - 1]), b = q(rs[i]);
    scan.see(a - b, rel * std::fabs(b) + 4 * kEps * std::fabs(b), rs[i].t);
  }
  return scan.finish();
}

/// Mean over [t[0], t[1]] of the quadratic through (t[j], v[j]), by
/// two-point Gauss quadrature.
double quadratic_mean(const std::array<double, 3>& t, const std::array<double, 3>& v) {
  auto at = [&](double x) {
    double sum = 0;
    for (int j = 0; j < 3; ++j) {
      double w = v[std::size_t(j)];
      for (int m = 0; m < 3; ++m)
        if (m != j) w *= (x - t[std::size_t(m)]) / (t[std::size_t(j)] - t[std::size_t(m)]);
      sum += w;
    }
    return sum;
  };
  const double mid = 0.5 * (t[0] + t[1]), half = 0.5 * (t[1] - t[0]);
  const double g = half / std::sqrt(3.0);
  return 0.5 * (at(mid - g) + at(mid + g));
}

/// Per-step identity dQ/dt = rhs, compared relative to `scale`. The right
/// side is averaged over the step through a quadratic in time that uses the
/// neighbouring record. Steps whose difference quotient cannot resolve the
/// tolerance in double precision are skipped.
template <class Q, class Rhs, class Scale>
CheckResult rate_identity(std::string name, const std::vector<DiagnosticsRecord>& rs,
                          double tol, Q q, Rhs rhs, Scale scale) {
  Scan scan(std::move(name));
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const auto &a = rs[i - 1], &b = rs[i];
    const double dt = b.t - a.t;
    const double rate = (q(b) - q(a)) / dt;
    double expected = 0.5 * (rhs(a) + rhs(b));
    if (rs.size() >= 3) {
      const auto& c = i + 1 < rs.size() ? rs[i + 1] : rs[i - 2];
      expected = quadratic_mean({a.t, b.t, c.t}, {rhs(a), rhs(b), rhs(c)});
    }
    const double s = 0.5 * (scale(a) + scale(b));
    const double noise = 8 * kEps * std::max(std::fabs(q(a)), std::fabs(q(b))) / dt;
    if (!(s > 0) || noise > 0.1 * tol * s) {
      scan.skip();
      continue;
    }
    const double rel = std::fabs(rate - expected) / s;
    scan.see(tol - rel, 0.0, b.t);
  }
  std::ostringstream os;
  os << "tolerance " << tol << " relative";
  return scan.finish(os.str());
}

double origin_of(const std::vector<DiagnosticsRecord>& rs, const TrajectoryContext& ctx) {
  return ctx.time_origin.value_or(rs.front().t);
}

// Warped checks -------------------------------------------------------------

void warped_checks(const std::vector<DiagnosticsRecord>& rs, const TrajectoryContext& ctx,
                   const VerifyOptions& opt, std::vector<CheckResult>& out) {
  const double origin = origin_of(rs, ctx);
  const int chi = euler_characteristic(ctx.topology);
  const double u_range = rs.front().u_max - rs.front().u_min;
  const double u_scale = std::max(std::fabs(rs.front().u_max), std::fabs(rs.front().u_min));
  const double u_slack = opt.monotone_tolerance * std::max(u_range, 1e-4 * std::max(1.0, u_scale));

  out.push_back(extrema_monotone(
      "u_extrema_monotone", rs, [](const auto& r) { return r.u_max; },
      [](const auto& r) { return r.u_min; }, u_slack));

  {
    const double c = rs.front().max_gradu_sq;
    const double t0 = rs.front().t;
    Scan scan("gradient_bound");
    for (const auto& r : rs) {
      const double bound = c / (2 * c * (r.t - t0) + 1);
      scan.see(bound - r.max_gradu_sq, opt.bound_tolerance * bound, r.t);
    }
    std::ostringstream os;
    os << "c = " << c;
    out.push_back(scan.finish(os.str()));
  }
  {
    Scan scan("S_lower_bound");
    for (const auto& r : rs) {
      const double tau = r.t - origin;
      if (tau < opt.bound_t_min) continue;
      scan.see(r.min_S + 1 / tau, opt.bound_tolerance / tau, r.t);
    }
    out.push_back(scan.finish("R >= S, so this also bounds min R"));
  }
  {
    const double v0 = rs.front().V, t0 = rs.front().t;
    const double c = rs.front().max_gradu_sq;
    Scan lower("volume_lower_bound"), upper("volume_upper_bound");
    for (const auto& r : rs) {
      const double tau = r.t - t0;
      const double lo = -4 * pi * chi * tau + v0;
      double hi;
      if (c * tau < 1e-8) {
        hi = v0 + (c * v0 - 4 * pi * chi) * tau;
      } else {
        const double k = 4 * pi * chi / c;
        hi = -k * (2 * c * tau + 1) + std::sqrt(2 * c * tau + 1) * (k + v0);
      }
      const double slack = opt.identity_tolerance * std::max(std::fabs(lo), v0);
      lower.see(r.V - lo, slack, r.t);
      upper.see(hi - r.V, slack, r.t);
    }
    out.push_back(lower.finish());
    out.push_back(upper.finish());
  }
  out.push_back(rate_identity(
      "volume_identity", rs, opt.identity_tolerance, [](const auto& r) { return r.V; },
      [chi](const auto& r) { return -4 * pi * chi + r.E; },
      [chi](const auto& r) { return std::fabs(4 * pi * chi) + r.E; }));
  {
    Scan scan("energy_decay_lemma");
    for (std::size_t i = 1; i < rs.size(); ++i) {
      const auto &a = rs[i - 1], &b = rs[i];
      const double dt = b.t - a.t;
      const double rate = (b.E - a.E) / dt;
      const double bound = -0.5 * (a.E * a.E / a.V + b.E * b.E / b.V);
      const double noise = 8 * kEps * std::max(a.E, b.E) / dt;
      if (noise > 0.1 * opt.identity_tolerance * std::fabs(rate) || a.E == 0) {
        scan.skip();
        continue;
      }
      scan.see(bound - rate, opt.identity_tolerance * std::fabs(rate), b.t);
    }
    out.push_back(scan.finish("dE/dt <= -E^2/V"));
  }
  out.push_back(nonincreasing_after("V_over_t_monotone", rs, origin, opt.lemma_t_min,
                                    opt.monotone_tolerance, [origin](const auto& r) {
                                      return r.V / (r.t - origin);
                                    }));
  if (ctx.topology == Topology::Torus) {
    Scan scan("loop_length_nondecreasing", true);
    for (std::size_t i = 1; i < rs.size(); ++i)
      scan.see(rs[i].L - rs[i - 1].L, opt.monotone_tolerance * rs[i].L, rs[i].t);
    out.push_back(scan.finish("shortest coordinate loop, an upper estimate of L"));
  } else {
    out.push_back(not_applicable("loop_length_nondecreasing", "torus bases only", true));
  }
}

void dissipation_check(const std::vector<DiagnosticsRecord>& rs,
                       const std::vector<WarpedState>& snaps, const VerifyOptions& opt,
                       std::vector<CheckResult>& out) {
  Scan scan("dissipation_identity");
  std::size_t i = 1;
  for (const auto& s : snaps) {
    while (i + 1 < rs.size() && rs[i].t < s.time) ++i;
    if (i + 1 >= rs.size() || rs[i].t != s.time) continue;
    const auto &a = rs[i - 1], &b = rs[i], &c = rs[i + 1];
    const double h1 = b.t - a.t, h2 = c.t - b.t;
    const double rate = -h2 / (h1 * (h1 + h2)) * a.E + (h2 - h1) / (h1 * h2) * b.E +
                        h1 / (h2 * (h1 + h2)) * c.E;
    const double d = dissipation(s);
    const double noise = 8 * kEps * b.E / std::min(h1, h2);
    if (!(d > 0) || noise > 0.1 * opt.dissipation_tolerance * d) {
      scan.skip();
      continue;
    }
    scan.see(opt.dissipation_tolerance - std::fabs(-rate - d) / d, 0.0, s.time);
  }
  std::ostringstream os;
  os << "tolerance " << opt.dissipation_tolerance << " relative";
  out.push_back(scan.finish(os.str()));
}

// Bundle checks -------------------------------------------------------------

void bundle_checks(const std::vector<DiagnosticsRecord>& rs, const TrajectoryContext& ctx,
                   const VerifyOptions& opt, std::vector<CheckResult>& out) {
  const double origin = origin_of(rs, ctx);
  out.push_back(extrema_monotone(
      "detG_monotone", rs, [](const auto& r) { return r.detG_max; },
      [](const auto& r) { return r.detG_min; },
      opt.monotone_tolerance * rs.front().detG_max));
  {
    Scan scan("energy_density_bound");
    for (const auto& r : rs) {
      const double tau = r.t - origin;
      if (tau < opt.bound_t_min) continue;
      scan.see(2 / tau - r.max_energy_density, opt.bound_tolerance * 2 / tau, r.t);
    }
    out.push_back(scan.finish("max ecal <= 2/t"));
  }
  out.push_back(rate_identity(
      "length_identity", rs, opt.identity_tolerance, [](const auto& r) { return r.L; },
      [](const auto& r) { return 0.25 * r.E; },
      [](const auto& r) { return 0.25 * r.E + 1e-12; }));
  {
    Scan scan("length_nondecreasing");
    for (std::size_t i = 1; i < rs.size(); ++i)
      scan.see(rs[i].L - rs[i - 1].L, 4 * kEps * rs[i].L, rs[i].t);
    out.push_back(scan.finish());
  }
  out.push_back(nonincreasing_after("L_over_sqrt_t_monotone", rs, origin, opt.lemma_t_min,
                                    opt.monotone_tolerance, [origin](const auto& r) {
                                      return r.L / std::sqrt(r.t - origin);
                                    }));

  const bool hyperbolic = std::fabs(ctx.gluing.trace()) > 2 + 1e-12;
  if (hyperbolic) {
    double num = 0, den = 0;
    for (const auto& r : rs) {
      const double tau = r.t - origin;
      if (tau < opt.length_t_min) continue;
      num += r.L * std::sqrt(tau);
      den += tau;
    }
    if (den == 0) {
      out.push_back(not_applicable("length_lower_bound", "run ends before the window"));
    } else {
      const double c = num / den;
      Scan scan("length_lower_bound");
      for (const auto& r : rs) {
        const double tau = r.t - origin;
        if (tau < opt.length_t_min) continue;
        scan.see(r.L - opt.length_factor * c * std::sqrt(tau), 0.0, r.t);
      }
      std::ostringstream os;
      os << "fitted c = " << c << ", translation length "
         << sol_limit_data(ctx.gluing).translation;
      out.push_back(scan.finish(os.str()));
    }
  } else {
    out.push_back(not_applicable("length_lower_bound", "hyperbolic holonomy only"));
  }

  Scan wplus("w_plus_monotone");
  std::optional<double> prev;
  for (const auto& r : rs) {
    if (!r.W_plus) continue;
    if (prev) wplus.see(*r.W_plus - *prev, opt.w_plus_tolerance, r.t);
    prev = r.W_plus;
  }
  out.push_back(wplus.finish());
}

}  // namespace

VerificationReport verify_bounds(const std::vector<DiagnosticsRecord>& records,
                                 const std::vector<WarpedState>& snapshots,
                                 const TrajectoryContext& ctx, const VerifyOptions& opt) {
  if (ctx.family != Family::Warped)
    fail(ErrorKind::InvalidArgument, "warped snapshots with a bundle context");
  require_ordered(records);
  VerificationReport rep;
  warped_checks(records, ctx, opt, rep.checks);
  if (snapshots.empty())
    rep.checks.push_back(not_applicable("dissipation_identity", "no snapshots"));
  else
    dissipation_check(records, snapshots, opt, rep.checks);
  return rep;
}

VerificationReport verify_bounds(const std::vector<DiagnosticsRecord>& records,
                                 const std::vector<BundleState>&,
                                 const TrajectoryContext& ctx, const VerifyOptions& opt) {
  if (ctx.family != Family::Bundle)
    fail(ErrorKind::InvalidArgument, "bundle snapshots with a warped context");
  require_ordered(records);
  VerificationReport rep;
  bundle_checks(records, ctx, opt, rep.checks);
  return rep;
}

// Fits ------------------------------------------------------------------------

namespace {

LinearFit fit_window(const std::vector<double>& x, const std::vector<double>& y,
                     const char* what) {
  if (x.size() < 3) {
    std::ostringstream os;
    os << "insufficient samples for " << what << " (" << x.size() << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return linear_fit(x, y);
}

FitReport from_fit(FitKind kind, const LinearFit& f) {
  FitReport r;
  r.kind = kind;
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.r2 = f.r2;
  r.samples = f.samples;
  return r;
}

}  // namespace

FitReport fit_asymptotics(const std::vector<DiagnosticsRecord>& rs,
                          const std::vector<BundleState>& snapshots,
                          const TrajectoryContext& ctx, FitKind kind, const FitOptions& opt) {
  require_ordered(rs);
  const double origin = origin_of(rs, ctx);
  const double t_first = rs.front().t, t_last = rs.back().t;
  std::vector<double> x, y;

  switch (kind) {
    case FitKind::ExpFlat: {
      const double start = t_first + 0.5 * (t_last - t_first);
      for (const auto& r : rs)
        if (r.t >= start && r.max_riem > 0) {
          x.push_back(r.t);
          y.push_back(std::log(r.max_riem));
        }
      FitReport f = from_fit(kind, fit_window(x, y, "exp-flat"));
      f.value = -f.slope;
      f.pass = f.slope < 0 && f.r2 >= opt.min_r2;
      std::ostringstream os;
      os << "ln max|Rm| over t in [" << start << ", " << t_last << "], rate " << f.value;
      f.detail = os.str();
      return f;
    }
    case FitKind::SolPower: {
      if (ctx.family != Family::Bundle)
        fail(ErrorKind::InvalidArgument, "sol-power needs a bundle run");
      // L^2/t tends to the squared translation length, which is invariant
      // under conjugation of H and equals 1/2 Tr X^2 when H is symmetric.
      const SolLimitData sol = sol_limit_data(ctx.gluing);
      const double limit = sol.translation * sol.translation;
      const double t_log_start = std::exp(0.5 * std::log(std::max(t_last - origin, 1.0)));
      for (const auto& r : rs) {
        const double tau = r.t - origin;
        if (tau < std::max(1.0, t_log_start)) continue;
        const double res = std::fabs(r.L * r.L / tau - limit);
        if (res > 0) {
          x.push_back(std::log(tau));
          y.push_back(std::log(res));
        }
      }
      FitReport f = from_fit(kind, fit_window(x, y, "sol-power"));
      const double tau_end = t_last - origin;
      f.value = rs.back().L * rs.back().L / tau_end;
      f.reference = limit;
      const bool slope_ok =
          std::fabs(f.value / limit - 1) <= opt.sol_relative_tolerance;

      std::vector<double> gx, gy;
      double worst_res = 0;
      for (const auto& s : snapshots) {
        const double tau = s.time - origin;
        if (tau < std::max(1.0, t_log_start)) continue;
        const double res = sol_geodesic_residual(s);
        worst_res = std::max(worst_res, res);
        if (res > 0) {
          gx.push_back(std::log(tau));
          gy.push_back(std::log(res));
        }
      }
      std::ostringstream os;
      os << "L^2/t = " << f.value << " vs " << limit << " (relative error "
         << std::fabs(f.value / limit - 1) << "); length residual exponent " << f.slope;
      bool geodesic_ok = false;
      if (worst_res < 1e-9 && !gx.empty()) {
        geodesic_ok = true;
        os << "; geodesic residual at round-off";
      } else if (gx.size() >= 3) {
        const LinearFit g = linear_fit(gx, gy);
        geodesic_ok = g.slope < 0;
        os << "; geodesic residual exponent " << g.slope << " (R^2 " << g.r2 << ", "
           << g.samples << " snapshots)";
      } else {
        os << "; too few snapshots for the geodesic residual";
      }
      f.pass = slope_ok && f.slope < 0 && geodesic_ok;
      f.detail = os.str();
      return f;
    }
    case FitKind::GrowthExponent: {
      const double span = std::log(std::max(t_last - origin, 1.0));
      const double start = std::exp(0.5 * span);
      for (const auto& r : rs) {
        const double tau = r.t - origin;
        if (tau >= std::max(start, 1.0)) {
          x.push_back(std::log(tau));
          y.push_back(std::log(r.L));
        }
      }
      FitReport f = from_fit(kind, fit_window(x, y, "growth-exponent"));
      f.value = f.slope;
      f.reference = 1.0 / 6;
      std::ostringstream os;
      os << "ln L against ln t over the final half of ln t; exponent " << f.slope
         << " next to the expected 1/6, not asserted";
      f.detail = os.str();
      return f;
    }
    case FitKind::CurvatureDecay: {
      double sup = 0;
      for (const auto& r : rs) {
        const double tau = r.t - origin;
        if (tau < opt.decay_t_min || !(r.max_riem > 0)) continue;
        sup = std::max(sup, tau * r.max_riem);
        x.push_back(std::log(tau));
        y.push_back(std::log(tau * r.max_riem));
      }
      FitReport f = from_fit(kind, fit_window(x, y, "curvature-decay"));
      f.value = sup;
      f.pass = opt.decay_two_sided ? std::fabs(f.slope) <= opt.decay_slope_band
                                   : f.slope <= opt.decay_slope_band;
      std::ostringstream os;
      os << "sup t max|Rm| = " << sup << ", trend " << f.slope
         << (opt.decay_two_sided ? " (two-sided band " : " (no-growth bound ")
         << opt.decay_slope_band << ")";
      f.detail = os.str();
      return f;
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown fit kind");
}

}  // namespace symflow
