// Acceptance harness: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes. Presets are run once and shared.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "symflow/scenario.hpp"
#include "symflow/spd.hpp"

using namespace symflow;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::map<std::string, ScenarioResult> cache;

const ScenarioResult& preset_run(const std::string& name) {
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioResult r = run_scenario(preset(name));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "  [%s: %s, %.1f s]\n", name.c_str(),
               std::string(to_string(r.stop_reason())).c_str(), secs);
  return cache.emplace(name, std::move(r)).first->second;
}

const std::vector<std::string> kWarped = {"sphere-collapse", "sphere-perturbed",
                                          "flat-torus-warped"};
const std::vector<std::string> kBundle = {"sol-exact", "sol-hyperbolic", "sol-entropy",
                                          "elliptic-bundle", "parabolic-bundle"};
const std::vector<std::string> kImmortal = {"flat-torus-warped", "sol-exact",
                                            "sol-hyperbolic",    "sol-entropy",
                                            "elliptic-bundle",   "parabolic-bundle"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Requires each named check to be present and not failed in the report;
// `need_pass` additionally demands at least one Pass across the presets.
Verdict checks_hold(const std::vector<std::string>& presets,
                    const std::vector<std::string>& names) {
  Verdict v{true, {}};
  std::map<std::string, int> passes;
  std::ostringstream os;
  for (const auto& p : presets) {
    const VerificationReport& rep = preset_run(p).report;
    for (const auto& n : names) {
      const CheckResult* c = rep.find(n);
      if (!c) {
        v.pass = false;
        os << p << ": " << n << " missing; ";
        continue;
      }
      if (c->status == CheckStatus::Fail) {
        v.pass = false;
        os << p << ": " << n << " FAIL margin " << fmt(c->worst_margin) << " at t="
           << fmt(c->time_of_worst) << "; ";
      }
      if (c->status == CheckStatus::Pass) ++passes[n];
    }
  }
  for (const auto& n : names) {
    if (passes[n] == 0) {
      v.pass = false;
      os << n << " never evaluated; ";
    } else {
      os << n << " ok on " << passes[n] << "; ";
    }
  }
  v.detail = os.str();
  return v;
}

const FitReport* find_fit(const ScenarioResult& r, FitKind k) {
  for (const auto& f : r.fits)
    if (f.kind == k) return &f;
  return nullptr;
}

// 1. Exact Sol solution stays fixed in G while g_yy = 4t.
Verdict sol_fixed_point(int n, double* g_err = nullptr, double* gyy_err = nullptr) {
  RunConfig c = preset("sol-exact");
  c.n = n;
  c.output_dir.clear();
  const ScenarioResult r = run_scenario(c);
  const auto& tr = std::get<BundleTrajectory>(r.stored.trajectory);
  const BundleState& init = tr.snapshots.front();
  double gmax = 0, ymax = 0;
  for (const auto& s : tr.snapshots) {
    for (int k = 0; k < s.n; ++k) {
      gmax = std::max(gmax, max_abs_diff(s.G[k], init.G[k]));
      const double exact = 4 * (s.time + c.sol_a);
      ymax = std::max(ymax, std::fabs(s.gyy[k] - exact) / exact);
    }
  }
  if (g_err) *g_err = gmax;
  if (gyy_err) *gyy_err = ymax;
  const bool ok = r.stop_reason() == StopReason::ReachedTEnd && gmax < 1e-6 && ymax < 1e-6 &&
                  init.time == 1.0 && tr.snapshots.back().time == 2.0;
  return {ok, "n=" + std::to_string(n) + ", t in [1,2]: max |G-G0| = " + fmt(gmax) +
                  ", max rel |g_yy-4t| = " + fmt(ymax)};
}

Verdict c1() { return sol_fixed_point(256); }

Verdict c2() {
  const ScenarioResult& r = preset_run("sphere-collapse");
  if (!r.singularity) return {false, "no singularity profile (stop " +
                                         std::string(to_string(r.stop_reason())) + ")"};
  const auto& s = *r.singularity;
  const bool ok = std::fabs(s.t_singular / 0.5 - 1) <= 0.01 && s.normalized_min >= 0.98 &&
                  s.normalized_max <= 1.02;
  return {ok, "T = " + fmt(s.t_singular) + ", (T-t) max R in [" + fmt(s.normalized_min) +
                  ", " + fmt(s.normalized_max) + "] over " +
                  std::to_string(s.profile_samples) + " snapshots"};
}

Verdict c3() {
  Verdict w = checks_hold(kWarped, {"u_extrema_monotone", "gradient_bound", "S_lower_bound"});
  Verdict b = checks_hold(kBundle, {"detG_monotone", "energy_density_bound"});
  return {w.pass && b.pass, w.detail + b.detail};
}

Verdict c4() {
  return checks_hold(kWarped, {"volume_identity", "dissipation_identity", "V_over_t_monotone"});
}

Verdict c5() {
  Verdict a = checks_hold(kBundle, {"length_identity", "L_over_sqrt_t_monotone"});
  Verdict b = checks_hold({"sol-hyperbolic", "sol-entropy"}, {"length_lower_bound"});
  return {a.pass && b.pass, a.detail + b.detail};
}

Verdict c6() {
  const ScenarioResult& r = preset_run("sol-hyperbolic");
  const FitReport* f = find_fit(r, FitKind::SolPower);
  if (!f) return {false, "sol-power fit missing"};
  const double oracle = sol_limit_data(Holonomy(2, 1, 1, 1)).translation;
  const bool ok = f->pass.value_or(false) && std::fabs(f->value / (oracle * oracle) - 1) <= 0.02;
  return {ok, f->detail};
}

Verdict c7() {
  std::ostringstream os;
  bool ok = true;
  for (const std::string p : {"flat-torus-warped", "elliptic-bundle"}) {
    const FitReport* f = find_fit(preset_run(p), FitKind::ExpFlat);
    if (!f) {
      ok = false;
      os << p << ": exp-flat fit missing; ";
      continue;
    }
    ok = ok && f->slope < 0 && f->r2 > 0.99;
    os << p << ": slope " << fmt(f->slope) << ", R^2 " << fmt(f->r2) << "; ";
  }
  return {ok, os.str()};
}

template <class State, class Curv>
double rescale_error(const State& s, double f, Curv&& curv) {
  const ScalarField a = curv(s, 1.0), b = curv(s, f);
  double worst = 0, ref = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::fabs(b[k] - f * f * a[k]));
    ref = std::max(ref, f * f * std::fabs(a[k]));
  }
  return ref > 0 ? worst / ref : worst;
}

// |Rm|^2 -> s^2 |Rm|^2 under g -> g(st)/s with u unchanged on warped states,
// and under the bundle rescaling.
Verdict c8() {
  double worst = 0;
  int states = 0;
  std::ostringstream os;
  for (const auto& p : kWarped) {
    const auto& tr = std::get<WarpedTrajectory>(preset_run(p).stored.trajectory);
    double here = 0;
    for (const auto* s : {&tr.snapshots.front(), &tr.snapshots[tr.snapshots.size() / 2],
                          &tr.snapshots.back()}) {
      // stored states: through the snapshot text format and back
      const WarpedState st = std::get<WarpedState>(parse_snapshot(snapshot_json(*s)));
      for (double f : {0.5, 4.0})
        here = std::max(here, rescale_error(st, f, [](const WarpedState& x, double g) {
                          return curvature_warped(
                                     g == 1.0 ? x : parabolic_rescale(x, g, RescaleKind::Warped2d))
                              .riem_norm_sq;
                        }));
      ++states;
    }
    os << p << " " << fmt(here) << "; ";
    worst = std::max(worst, here);
  }
  for (const auto& p : kBundle) {
    const auto& tr = std::get<BundleTrajectory>(preset_run(p).stored.trajectory);
    double here = 0;
    for (const auto* s : {&tr.snapshots.front(), &tr.snapshots.back()}) {
      const BundleState st = std::get<BundleState>(parse_snapshot(snapshot_json(*s)));
      for (double f : {0.5, 4.0})
        here = std::max(here, rescale_error(st, f, [](const BundleState& x, double g) {
                          return curvature_bundle(g == 1.0 ? x : parabolic_rescale(x, g))
                              .riem_norm_sq;
                        }));
      ++states;
    }
    os << p << " " << fmt(here) << "; ";
    worst = std::max(worst, here);
  }
  return {worst < 1e-12, std::to_string(states) + " stored states, s in {0.5, 4}, max relative "
                         "deviation from s^2 |Rm|^2: " + os.str()};
}

Verdict c9() {
  const ScenarioResult& r = preset_run("sol-entropy");
  const CheckResult* w = r.report.find("w_plus_monotone");
  const CheckResult* m = r.report.find("conjugate_heat_mass");
  if (!w || !m) return {false, "W_+ or mass check missing"};
  const auto& recs = std::get<BundleTrajectory>(r.stored.trajectory).records;
  double first = NAN, last = NAN;
  for (const auto& q : recs)
    if (q.W_plus) {
      if (std::isnan(first)) first = *q.W_plus;
      last = *q.W_plus;
    }
  const bool ok = w->status == CheckStatus::Pass && m->status == CheckStatus::Pass;
  return {ok, "W_+ from " + fmt(first) + " to " + fmt(last) + ", worst step change " +
                  fmt(w->worst_margin) + " (" + w->detail + "); " + m->detail};
}

double sphere_error(int n) {
  StepController c;
  c.cfl = 0.4;
  c.t_end = 0.25;
  const WarpedTrajectory tr = run(make_round_sphere(n, 1.0), c, FlowMode::Modified);
  const auto& p = std::get<SphereProfile>(tr.snapshots.back().metric);
  const double h = pi / n;
  double err = 0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    err = std::max(err, std::fabs(p.a[i] - 0.5));
    err = std::max(err, std::fabs(p.f[i] - std::sqrt(0.5) * std::sin(x)));
  }
  return err;
}

Verdict c10() {
  double g16, y16, g32, y32;
  sol_fixed_point(16, &g16, &y16);
  sol_fixed_point(32, &g32, &y32);
  const double sol16 = std::max(g16, y16), sol32 = std::max(g32, y32);
  const double sph16 = sphere_error(16), sph32 = sphere_error(32);
  const double rs = sol16 / sol32, rp = sph16 / sph32;
  return {rs >= 3.5 && rp >= 3.5,
          "Sol: " + fmt(sol16) + " -> " + fmt(sol32) + " (x" + fmt(rs) + "); sphere: " +
              fmt(sph16) + " -> " + fmt(sph32) + " (x" + fmt(rp) + ")"};
}

Verdict c11() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& p : kImmortal) {
    const ScenarioResult& r = preset_run(p);
    const FitReport f = fit_stored(r.stored, FitKind::CurvatureDecay);
    ok = ok && f.pass.value_or(false) && std::isfinite(f.value);
    os << p << ": sup t|Rm| " << fmt(f.value) << ", trend " << fmt(f.slope)
       << (f.pass.value_or(false) ? "" : " FAIL") << "; ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"Sol fixed point", c1},
      {"round-sphere extinction", c2},
      {"maximum-principle suite", c3},
      {"volume/energy identities", c4},
      {"bundle length laws", c5},
      {"Sol attractor", c6},
      {"flat attractors", c7},
      {"rescaling identities", c8},
      {"W_+ monotonicity", c9},
      {"convergence order", c10},
      {"curvature-decay law", c11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %2zu %-26s %s  %s\n", i + 1, criteria[i].first,
                v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
