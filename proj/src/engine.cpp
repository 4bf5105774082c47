#include "symflow/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "symflow/error.hpp"
#include "symflow/fit.hpp"

namespace symflow {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::ReachedTEnd: return "reached_t_end";
    case StopReason::CurvatureBlowup: return "curvature_blowup";
    case StopReason::StepUnderflow: return "step_underflow";
  }
  return "?";
}

std::string_view to_string(RescaleKind k) {
  switch (k) {
    case RescaleKind::Warped2d: return "warped-2d";
    case RescaleKind::Warped3d: return "warped-3d";
    case RescaleKind::Bundle: return "bundle";
  }
  return "?";
}

void validate(const StepController& c) {
  auto bad = [](const std::string& what) { fail(ErrorKind::Config, what); };
  if (!(c.cfl > 0 && c.cfl < 1)) bad("cfl must lie in (0, 1)");
  if (!(c.dt_min > 0 && c.dt_min <= c.dt_max)) bad("need 0 < dt_min <= dt_max");
  if (!(c.curvature_stop > 0)) bad("curvature_stop must be positive");
  if (!std::isfinite(c.t_end)) bad("t_end must be finite");
  if (!(c.snapshot_interval >= 0)) bad("snapshot_interval must be nonnegative");
  if (!(c.snapshot_growth == 0 || c.snapshot_growth > 1))
    bad("snapshot_growth must be 0 or greater than 1");
  if (c.record_stride < 1) bad("record_stride must be at least 1");
}

double proposed_dt(double spacing_sq, double max_riem, const StepController& c) {
  const double dt = c.cfl * spacing_sq / (1 + max_riem * spacing_sq);
  return std::min(dt, c.dt_max);
}

namespace {

double spacing_sq(const WarpedState& s) { return min_spacing_sq(s.metric); }
double spacing_sq(const BundleState& s) { return min_spacing_sq(s); }

template <class State>
StepOutcome step_impl(State& s, double dt, const StepController& c, FlowMode mode) {
  StepOutcome o;
  while (dt >= c.dt_min) {
    try {
      State next = advance_rk4(s, dt, mode);
      validate(next);
      s = std::move(next);
      o.accepted = true;
      o.dt = dt;
      return o;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidState && e.kind() != ErrorKind::Numerical) throw;
    }
    dt *= 0.5;
    ++o.halvings;
  }
  o.dt = dt;
  return o;
}

template <class State>
Trajectory<State> run_impl(const State& initial, const StepController& c, FlowMode mode) {
  validate(c);
  validate(initial);
  if (!(c.t_end > initial.time)) fail(ErrorKind::Config, "t_end must exceed the start time");

  Trajectory<State> tr;
  tr.mode = mode;
  State s = initial;
  DiagnosticsRecord rec = basic_functionals(s);
  tr.records.push_back(rec);
  tr.snapshots.push_back(s);

  double growth_ref = rec.max_riem;
  // Snapshot targets are start + k * interval; one that falls within
  // round-off of t_end is t_end itself.
  const double t_start = s.time;
  long snap_index = 1;
  auto snap_time = [&](long k) -> double {
    if (!(c.snapshot_interval > 0)) return INFINITY;
    const double t = t_start + double(k) * c.snapshot_interval;
    return std::fabs(t - c.t_end) <= 1e-9 * c.snapshot_interval ? c.t_end : t;
  };
  double next_snap = snap_time(snap_index);
  int since_record = 0;
  bool record_current = true, snapshot_current = true;

  if (rec.max_riem >= c.curvature_stop) {
    tr.stop_reason = StopReason::CurvatureBlowup;
    return tr;
  }

  while (s.time < c.t_end) {
    double dt = proposed_dt(spacing_sq(s), rec.max_riem, c);
    const double target = std::min(c.t_end, next_snap);
    const double gap = target - s.time;
    bool lands = false;
    if (gap <= dt) {
      dt = gap;
      lands = true;
    } else if (gap < 2 * dt) {
      dt = 0.5 * gap;
    }

    const StepOutcome o = step(s, dt, c, mode);
    if (!o.accepted) {
      tr.stop_reason = StopReason::StepUnderflow;
      break;
    }
    ++tr.accepted_steps;
    tr.rejected_steps += std::size_t(o.halvings);
    if (lands && o.halvings == 0) s.time = target;

    rec = basic_functionals(s);
    rec.dt = o.dt;
    record_current = snapshot_current = false;
    if (++since_record >= c.record_stride) {
      tr.records.push_back(rec);
      since_record = 0;
      record_current = true;
    }

    bool want_snapshot = false;
    if (s.time >= next_snap) {
      want_snapshot = true;
      while (next_snap <= s.time) next_snap = snap_time(++snap_index);
    }
    if (c.snapshot_growth > 0 && rec.max_riem >= growth_ref * c.snapshot_growth) {
      want_snapshot = true;
      growth_ref = rec.max_riem;
    }
    if (want_snapshot) {
      tr.snapshots.push_back(s);
      snapshot_current = true;
    }

    if (!std::isfinite(rec.max_riem) || rec.max_riem >= c.curvature_stop) {
      tr.stop_reason = StopReason::CurvatureBlowup;
      break;
    }
  }

  if (!record_current && tr.records.back().t < s.time) tr.records.push_back(rec);
  if (!snapshot_current && tr.snapshots.back().time < s.time) tr.snapshots.push_back(s);
  return tr;
}

}  // namespace

StepOutcome step(WarpedState& s, double dt, const StepController& c, FlowMode mode) {
  return step_impl(s, dt, c, mode);
}

StepOutcome step(BundleState& s, double dt, const StepController& c, FlowMode mode) {
  return step_impl(s, dt, c, mode);
}

WarpedTrajectory run(const WarpedState& initial, const StepController& c, FlowMode mode) {
  return run_impl(initial, c, mode);
}

BundleTrajectory run(const BundleState& initial, const StepController& c, FlowMode mode) {
  return run_impl(initial, c, mode);
}

// Rescaling -------------------------------------------------------------------

namespace {

void require_factor(double s) {
  if (!(s > 0) || !std::isfinite(s))
    fail(ErrorKind::InvalidArgument, "rescale factor must be positive and finite");
}

void scale(ScalarField& v, double k) {
  for (double& x : v) x *= k;
}

/// Curvature-type entries scale by s, lengths by s^-1/2, times by 1/s.
DiagnosticsRecord rescale_common(DiagnosticsRecord r, double s) {
  r.t /= s;
  r.dt /= s;
  r.min_S *= s;
  r.max_gradu_sq *= s;
  r.max_riem *= s;
  r.max_energy_density *= s;
  r.L /= std::sqrt(s);
  r.W_plus.reset();
  return r;
}

}  // namespace

WarpedState parabolic_rescale(const WarpedState& in, double factor, RescaleKind kind) {
  require_factor(factor);
  if (kind == RescaleKind::Bundle)
    fail(ErrorKind::InvalidArgument, "bundle rescaling needs a bundle state");
  WarpedState out = in;
  const double k = 1.0 / factor;
  if (auto* t = std::get_if<TorusMetric>(&out.metric)) {
    scale(t->g11, k);
    scale(t->g12, k);
    scale(t->g22, k);
  } else {
    auto& p = std::get<SphereProfile>(out.metric);
    scale(p.a, k);
    scale(p.f, std::sqrt(k));
  }
  if (kind == RescaleKind::Warped3d)
    for (double& u : out.u) u -= 0.5 * std::log(factor);
  out.time = in.time / factor;
  return out;
}

BundleState parabolic_rescale(const BundleState& in, double factor) {
  require_factor(factor);
  BundleState out = in;
  scale(out.gyy, 1.0 / factor);
  out.time = in.time / factor;
  return out;
}

WarpedTrajectory parabolic_rescale(const WarpedTrajectory& t, double factor,
                                   RescaleKind kind) {
  WarpedTrajectory out = t;
  for (auto& s : out.snapshots) s = parabolic_rescale(s, factor, kind);
  const double shift = kind == RescaleKind::Warped3d ? -0.5 * std::log(factor) : 0.0;
  for (auto& r : out.records) {
    // E and the Gauss-Bonnet integral are scale invariant on a surface.
    r = rescale_common(r, factor);
    r.V /= factor;
    r.u_min += shift;
    r.u_max += shift;
    r.detG_min *= std::exp(2 * shift);
    r.detG_max *= std::exp(2 * shift);
  }
  return out;
}

BundleTrajectory parabolic_rescale(const BundleTrajectory& t, double factor) {
  BundleTrajectory out = t;
  for (auto& s : out.snapshots) s = parabolic_rescale(s, factor);
  for (auto& r : out.records) {
    r = rescale_common(r, factor);
    r.V /= std::sqrt(factor);
    r.E *= std::sqrt(factor);
  }
  return out;
}

// Singularity profile -----------------------------------------------------------

SingularityProfile singularity_profile(const WarpedTrajectory& tr) {
  if (tr.stop_reason != StopReason::CurvatureBlowup)
    fail(ErrorKind::InvalidArgument,
         "singularity profile needs a trajectory that ended in curvature blowup");
  if (tr.records.size() < 3 || tr.snapshots.empty())
    fail(ErrorKind::InvalidArgument, "trajectory too short for a singularity profile");

  const double top = tr.records.back().max_riem;
  std::vector<double> ts, inv;
  for (const auto& r : tr.records) {
    if (r.max_riem >= 0.1 * top) {
      ts.push_back(r.t);
      inv.push_back(1.0 / r.max_riem);
    }
  }
  const LinearFit f = linear_fit(ts, inv);
  if (!(f.slope < 0)) fail(ErrorKind::Numerical, "curvature is not growing near the end");

  SingularityProfile p;
  p.t_singular = -f.intercept / f.slope;
  p.fit_samples = f.samples;
  p.normalized_min = INFINITY;
  p.normalized_max = -INFINITY;
  for (const auto& s : tr.snapshots) {
    const WarpedCurvature c = curvature_warped(s);
    const double max_riem = std::sqrt(*std::max_element(c.riem_norm_sq.begin(),
                                                        c.riem_norm_sq.end()));
    if (max_riem < 0.1 * top || s.time >= p.t_singular) continue;
    const double v = (p.t_singular - s.time) * *std::max_element(c.r_n.begin(), c.r_n.end());
    p.normalized_min = std::min(p.normalized_min, v);
    p.normalized_max = std::max(p.normalized_max, v);
    ++p.profile_samples;
  }
  if (p.profile_samples == 0)
    fail(ErrorKind::InvalidArgument, "no snapshots inside the last decade of growth");

  const WarpedState& last = tr.snapshots.back();
  const ScalarField k = gauss_curvature(last.metric);
  const auto [klo, khi] = std::minmax_element(k.begin(), k.end());
  p.roundness = *khi / *klo;
  const auto [ulo, uhi] = std::minmax_element(last.u.begin(), last.u.end());
  p.u_oscillation = *uhi - *ulo;
  return p;
}

}  // namespace symflow
