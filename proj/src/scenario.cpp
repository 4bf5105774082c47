#include "symflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "symflow/error.hpp"

namespace symflow {

AnySnapshot initial_state(const RunConfig& c) {
  validate(c);
  switch (c.initial) {
    case InitialKind::FlatTorus: return make_flat_torus(c.n, c.side, c.amplitude, c.u0);
    case InitialKind::BumpyTorus: {
      WarpedState s = make_bumpy_torus(c.n, c.bump);
      for (double& u : s.u) u = c.u0;
      return s;
    }
    case InitialKind::RoundSphere: return make_round_sphere(c.n, c.radius, c.amplitude, c.u0);
    case InitialKind::SolSlice: return make_sol_slice(c.n, c.sol_c, c.sol_a, c.bundle.t0);
    case InitialKind::Holonomy: {
      const auto& h = c.holonomy;
      return make_bundle(c.n, Holonomy(h[0], h[1], h[2], h[3]), c.bundle);
    }
  }
  fail(ErrorKind::Config, "unknown initial data");
}

TrajectoryContext context_for(const RunConfig& c) {
  TrajectoryContext ctx;
  ctx.family = c.family();
  ctx.mode = c.mode;
  ctx.time_origin = c.time_origin;
  ctx.topology = c.initial == InitialKind::RoundSphere ? Topology::SphereRotsym : Topology::Torus;
  if (c.initial == InitialKind::Holonomy) {
    const auto& h = c.holonomy;
    ctx.holonomy = Holonomy(h[0], h[1], h[2], h[3]);
    ctx.gluing = ctx.holonomy->matrix();
  } else if (c.initial == InitialKind::SolSlice) {
    ctx.gluing = make_sol_slice(8, c.sol_c, c.sol_a, c.bundle.t0).gluing;
  }
  return ctx;
}

FitOptions fit_options_for(const TrajectoryContext& ctx) {
  FitOptions o;
  o.decay_two_sided =
      ctx.family == Family::Bundle && std::fabs(ctx.gluing.trace()) > 2 + 1e-12;
  return o;
}

StopReason ScenarioResult::stop_reason() const {
  return std::visit([](const auto& t) { return t.stop_reason; }, stored.trajectory);
}

namespace {

CheckResult fit_check(const FitReport& f) {
  CheckResult c;
  c.name = "fit:" + std::string(to_string(f.kind));
  c.diagnostic = !f.pass.has_value();
  c.status = !f.pass ? CheckStatus::NotApplicable
                     : (*f.pass ? CheckStatus::Pass : CheckStatus::Fail);
  c.worst_margin = f.slope;
  std::ostringstream os;
  os << "slope " << f.slope << ", R^2 " << f.r2 << ", value " << f.value;
  if (f.reference) os << " (reference " << *f.reference << ")";
  os << "; " << f.detail;
  c.detail = os.str();
  return c;
}

/// Backward conjugate heat solve over the snapshots from `from` onward and
/// W_+ attached to the matching records. Returns the worst mass drift.
double attach_w_plus(BundleTrajectory& tr, double from) {
  std::vector<BundleState> window;
  for (const auto& s : tr.snapshots)
    if (s.time >= from) window.push_back(s);
  if (window.size() < 2) fail(ErrorKind::Config, "too few snapshots for the W+ check");

  const ConjugateHeatField terminal = uniform_terminal(window.back());
  const auto fields = conjugate_heat_backward(window, terminal);
  const double mass0 = conjugate_heat_mass(window.back(), terminal);
  double drift = 0;
  std::size_t r = 0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    drift = std::max(drift, std::fabs(conjugate_heat_mass(window[i], fields[i]) - mass0));
    const double w = w_plus(window[i], conjugate_heat_potential(fields[i]), fields[i].time);
    while (r < tr.records.size() && tr.records[r].t < window[i].time) ++r;
    if (r < tr.records.size() && tr.records[r].t == window[i].time) tr.records[r].W_plus = w;
  }
  return drift;
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& c) {
  validate(c);
  if (c.w_plus && c.controller.record_stride != 1)
    fail(ErrorKind::Config, "verify.w_plus needs controller.record_stride = 1");
  if (c.w_plus && !(c.controller.snapshot_interval > 0))
    fail(ErrorKind::Config, "verify.w_plus needs a snapshot interval");

  ScenarioResult res;
  res.config = c;
  res.stored.context = context_for(c);
  const TrajectoryContext& ctx = res.stored.context;
  const AnySnapshot init = initial_state(c);

  std::optional<double> drift;
  if (const auto* w = std::get_if<WarpedState>(&init)) {
    WarpedTrajectory tr = run(*w, c.controller, c.mode);
    res.report = verify_bounds(tr.records, tr.snapshots, ctx, c.verify);
    if (tr.stop_reason == StopReason::CurvatureBlowup && ctx.topology == Topology::SphereRotsym)
      res.singularity = singularity_profile(tr);
    res.stored.trajectory = std::move(tr);
  } else {
    BundleTrajectory tr = run(std::get<BundleState>(init), c.controller, c.mode);
    if (c.w_plus) drift = attach_w_plus(tr, c.w_plus_from);
    res.report = verify_bounds(tr.records, tr.snapshots, ctx, c.verify);
    res.stored.trajectory = std::move(tr);
  }

  {
    CheckResult e;
    e.name = "stop_reason";
    const StopReason got = res.stop_reason();
    if (c.expect_stop) {
      e.status = got == *c.expect_stop ? CheckStatus::Pass : CheckStatus::Fail;
      e.detail = "expected " + std::string(to_string(*c.expect_stop)) + ", got " +
                 std::string(to_string(got));
    } else {
      e.status = CheckStatus::NotApplicable;
      e.detail = "got " + std::string(to_string(got));
    }
    const auto& recs = std::visit([](const auto& t) -> const auto& { return t.records; },
                                  res.stored.trajectory);
    e.time_of_worst = recs.back().t;
    res.report.checks.push_back(e);
  }
  if (drift) {
    CheckResult m;
    m.name = "conjugate_heat_mass";
    m.worst_margin = c.verify.mass_tolerance - *drift;
    m.status = *drift < c.verify.mass_tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    std::ostringstream os;
    os << "max mass drift " << *drift;
    m.detail = os.str();
    res.report.checks.push_back(m);
  }
  if (res.singularity) {
    const auto& s = *res.singularity;
    CheckResult p;
    p.name = "singularity_profile";
    p.diagnostic = true;
    p.status = CheckStatus::Pass;
    p.time_of_worst = s.t_singular;
    std::ostringstream os;
    os << "T = " << s.t_singular << ", (T-t) max R in [" << s.normalized_min << ", "
       << s.normalized_max << "], roundness " << s.roundness << ", u oscillation "
       << s.u_oscillation;
    p.detail = os.str();
    res.report.checks.push_back(p);
  }

  for (FitKind k : c.fits) {
    FitReport f = fit_stored(res.stored, k);
    res.report.checks.push_back(fit_check(f));
    res.fits.push_back(std::move(f));
  }

  if (!c.output_dir.empty()) {
    write_trajectory(c.output_dir, res.stored, c.write_snapshots);
    write_text((std::filesystem::path(c.output_dir) / "config.ini").string(),
               serialize_config(c));
    write_text((std::filesystem::path(c.output_dir) / "report.json").string(),
               report_json(res));
  }
  return res;
}

VerificationReport verify_stored(const StoredTrajectory& t, const VerifyOptions& opt) {
  return std::visit(
      [&](const auto& tr) { return verify_bounds(tr.records, tr.snapshots, t.context, opt); },
      t.trajectory);
}

FitReport fit_stored(const StoredTrajectory& t, FitKind kind) {
  static const std::vector<BundleState> none;
  const FitOptions opt = fit_options_for(t.context);
  if (const auto* b = std::get_if<BundleTrajectory>(&t.trajectory))
    return fit_asymptotics(b->records, b->snapshots, t.context, kind, opt);
  return fit_asymptotics(std::get<WarpedTrajectory>(t.trajectory).records, none, t.context,
                         kind, opt);
}

std::string report_text(const VerificationReport& r) {
  std::ostringstream os;
  for (const auto& c : r.checks) {
    os << (c.status == CheckStatus::Pass   ? "PASS"
           : c.status == CheckStatus::Fail ? (c.diagnostic ? "WARN" : "FAIL")
                                           : "N/A ")
       << "  " << c.name;
    if (c.status != CheckStatus::NotApplicable)
      os << "  margin=" << c.worst_margin << " at t=" << c.time_of_worst;
    if (c.diagnostic) os << "  [diagnostic]";
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n';
  }
  os << (r.passed() ? "overall: pass" : "overall: FAIL") << '\n';
  return os.str();
}

std::string report_json(const ScenarioResult& r) {
  using nlohmann::json;
  json j;
  j["preset"] = r.config.preset;
  j["passed"] = r.passed();
  j["stop_reason"] = std::string(to_string(r.stop_reason()));
  j["expected_stop"] = r.config.expect_stop
                           ? json(std::string(to_string(*r.config.expect_stop)))
                           : json(nullptr);
  json checks = json::array();
  for (const auto& c : r.report.checks) {
    checks.push_back({{"name", c.name},
                      {"status", std::string(to_string(c.status))},
                      {"worst_margin", c.worst_margin},
                      {"time_of_worst", c.time_of_worst},
                      {"diagnostic", c.diagnostic},
                      {"detail", c.detail}});
  }
  j["checks"] = checks;
  json fits = json::array();
  for (const auto& f : r.fits) {
    json e{{"kind", std::string(to_string(f.kind))},
           {"slope", f.slope},
           {"intercept", f.intercept},
           {"r2", f.r2},
           {"samples", f.samples},
           {"value", f.value},
           {"detail", f.detail}};
    e["reference"] = f.reference ? json(*f.reference) : json(nullptr);
    e["pass"] = f.pass ? json(*f.pass) : json(nullptr);
    fits.push_back(e);
  }
  j["fits"] = fits;
  if (r.singularity) {
    const auto& s = *r.singularity;
    j["singularity"] = {{"t_singular", s.t_singular},
                        {"normalized_min", s.normalized_min},
                        {"normalized_max", s.normalized_max},
                        {"roundness", s.roundness},
                        {"u_oscillation", s.u_oscillation}};
  } else {
    j["singularity"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace symflow
