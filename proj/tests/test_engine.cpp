#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "symflow/engine.hpp"
#include "symflow/error.hpp"

using namespace symflow;
namespace gen = symflow::testgen;
using std::numbers::pi;

TEST_CASE("proposed_dt") {
  StepController c;
  c.cfl = 0.4;
  c.dt_max = 10;
  CHECK(proposed_dt(0.01, 0.0, c) == doctest::Approx(0.004));
  CHECK(proposed_dt(0.01, 100.0, c) == doctest::Approx(0.002));
  c.dt_max = 1e-3;
  CHECK(proposed_dt(0.01, 0.0, c) == 1e-3);
  for (int k = 0; k < 100; ++k) {
    c.dt_max = 1;
    const double s = gen::uniform(1e-4, 1), r = gen::uniform(0, 1e3);
    const double dt = proposed_dt(s, r, c);
    CHECK(dt > 0);
    CHECK(dt <= c.cfl * s);
    CHECK(dt * r <= c.cfl + 1e-12);
  }
}

TEST_CASE("controller validation") {
  StepController c;
  c.cfl = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = StepController{};
  c.dt_min = 2;
  c.dt_max = 1;
  CHECK_THROWS_AS(validate(c), Error);
  c = StepController{};
  c.record_stride = 0;
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("step reports underflow when dt is below dt_min") {
  WarpedState s = make_flat_torus(16, 1, 0.1);
  StepController c;
  c.dt_min = 1e-3;
  const StepOutcome o = step(s, 1e-4, c, FlowMode::Modified);
  CHECK_FALSE(o.accepted);
  CHECK(s.time == 0.0);
}

TEST_CASE("run lands exactly on snapshot and end times") {
  StepController c;
  c.cfl = 0.3;
  c.t_end = 1.0;
  c.snapshot_interval = 0.1;
  const WarpedTrajectory tr = run(make_flat_torus(16, 2.0, 0.05), c, FlowMode::Modified);
  CHECK(tr.stop_reason == StopReason::ReachedTEnd);
  REQUIRE(tr.snapshots.size() == 11);
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i)
    CHECK(tr.snapshots[i].time == doctest::Approx(0.1 * double(i)).epsilon(1e-12));
  CHECK(tr.snapshots.back().time == 1.0);
  CHECK(tr.records.back().t == 1.0);
  CHECK(tr.records.size() == tr.accepted_steps + 1);
  for (std::size_t i = 1; i < tr.records.size(); ++i) CHECK(tr.records[i].t > tr.records[i - 1].t);
}

TEST_CASE("flat T^3 bundle is a fixed point of the stepper") {
  BundleState s;
  s.n = 16;
  s.gyy.assign(16, 2.0);
  s.G.assign(16, Sym2{1.5, -0.2, 0.8});
  StepController c;
  c.t_end = 3;
  const BundleTrajectory tr = run(s, c, FlowMode::Modified);
  CHECK(tr.stop_reason == StopReason::ReachedTEnd);
  const BundleState& e = tr.snapshots.back();
  for (int k = 0; k < 16; ++k) {
    CHECK(e.gyy[k] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(max_abs_diff(e.G[k], Sym2{1.5, -0.2, 0.8}) < 1e-14);
  }
}

TEST_CASE("round sphere radius tracks 1 - 2t") {
  StepController c;
  c.cfl = 0.4;
  c.t_end = 0.25;
  const WarpedTrajectory tr = run(make_round_sphere(128, 1.0), c, FlowMode::Modified);
  REQUIRE(tr.stop_reason == StopReason::ReachedTEnd);
  const auto& p = std::get<SphereProfile>(tr.snapshots.back().metric);
  for (double a : p.a) CHECK(std::fabs(a / 0.5 - 1) < 1e-6);
  CHECK(tr.records.back().V == doctest::Approx(4 * pi * 0.5).epsilon(1e-6));
}

TEST_CASE("sphere blows up before the volume bound V(0)/(8 pi)") {
  StepController c;
  c.cfl = 0.4;
  c.t_end = 1.0;
  const WarpedState s = make_round_sphere(64, 1.0, 0.05);
  const WarpedTrajectory tr = run(s, c, FlowMode::Modified);
  CHECK(tr.stop_reason == StopReason::CurvatureBlowup);
  const double bound = area(s.metric) / (8 * pi);
  CHECK(tr.records.back().t < bound * (1 + 1e-3));

  const SingularityProfile p = singularity_profile(tr);
  CHECK(p.t_singular == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(p.normalized_min > 0.98);
  CHECK(p.normalized_max < 1.02);
}

TEST_CASE("exact shrinking sphere profile") {
  StepController c;
  c.cfl = 0.4;
  c.t_end = 1.0;
  c.snapshot_growth = std::pow(10.0, 0.1);
  const WarpedTrajectory tr = run(make_round_sphere(64, 1.0), c, FlowMode::Modified);
  const SingularityProfile p = singularity_profile(tr);
  CHECK(p.t_singular == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(p.normalized_min == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(p.normalized_max == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(p.roundness == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(p.u_oscillation < 1e-9);
}

TEST_CASE("singularity_profile rejects immortal runs") {
  StepController c;
  c.t_end = 1.0;
  const WarpedTrajectory tr = run(make_flat_torus(16, 1.0, 0.01), c, FlowMode::Modified);
  CHECK_THROWS_AS(singularity_profile(tr), Error);
}

TEST_CASE("flat torus warped flow exists to t = 50") {
  StepController c;
  c.cfl = 0.3;
  c.t_end = 50;
  c.record_stride = 50;
  const WarpedTrajectory tr = run(make_flat_torus(16, 8.0, 0.1), c, FlowMode::Modified);
  CHECK(tr.stop_reason == StopReason::ReachedTEnd);
  CHECK(tr.records.back().t == 50.0);
  CHECK(tr.records.back().max_riem < tr.records.front().max_riem);
}

TEST_CASE("bundle flows exist to t = 50") {
  for (const Holonomy& h : {Holonomy(0, -1, 1, 0), Holonomy(1, 1, 0, 1), Holonomy(2, 1, 1, 1)}) {
    BundleInit init;
    init.eps = 0.3;
    init.delta = 0.1;
    init.eps_g = 0.2;
    init.gyy0 = 4;
    StepController c;
    c.cfl = 0.4;
    c.t_end = 50;
    c.record_stride = 100;
    const BundleTrajectory tr = run(make_bundle(32, h, init), c, FlowMode::Modified);
    CHECK(tr.stop_reason == StopReason::ReachedTEnd);
  }
}

TEST_CASE("trajectory rescaling") {
  StepController c;
  c.t_end = 0.5;
  c.snapshot_interval = 0.25;
  const WarpedTrajectory tr = run(make_flat_torus(16, 1.0, 0.05), c, FlowMode::Modified);

  const WarpedTrajectory same = parabolic_rescale(tr, 1.0, RescaleKind::Warped2d);
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    CHECK(same.records[i].t == tr.records[i].t);
    CHECK(same.records[i].max_riem == tr.records[i].max_riem);
  }

  for (double s : {0.5, 4.0}) {
    const WarpedTrajectory r = parabolic_rescale(tr, s, RescaleKind::Warped3d);
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
      CHECK(r.records[i].t == doctest::Approx(tr.records[i].t / s));
      CHECK(r.records[i].max_riem == doctest::Approx(s * tr.records[i].max_riem).epsilon(1e-13));
      CHECK(r.records[i].V == doctest::Approx(tr.records[i].V / s).epsilon(1e-13));
      CHECK(r.records[i].u_min ==
            doctest::Approx(tr.records[i].u_min - 0.5 * std::log(s)).epsilon(1e-13));
    }
    // stored diagnostics agree with diagnostics recomputed on the rescaled states
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
      const DiagnosticsRecord d = basic_functionals(r.snapshots[i]);
      CHECK(d.t == doctest::Approx(r.snapshots[i].time));
      CHECK(d.max_riem == doctest::Approx(s * basic_functionals(tr.snapshots[i]).max_riem)
                              .epsilon(1e-12));
    }
  }
}

TEST_CASE("bundle trajectory rescaling matches recomputed diagnostics") {
  BundleInit init;
  init.eps = 0.2;
  init.eps_g = 0.1;
  StepController c;
  c.t_end = 0.3;
  c.snapshot_interval = 0.1;
  const BundleTrajectory tr = run(make_bundle(32, Holonomy(2, 1, 1, 1), init), c,
                                  FlowMode::Modified);
  for (double s : {0.5, 4.0}) {
    const BundleTrajectory r = parabolic_rescale(tr, s);
    for (const auto& snap : r.snapshots) {
      const DiagnosticsRecord d = basic_functionals(snap);
      const auto it = std::find_if(r.records.begin(), r.records.end(), [&](const auto& q) {
        return std::fabs(q.t - snap.time) < 1e-12;
      });
      REQUIRE(it != r.records.end());
      CHECK(d.max_riem == doctest::Approx(it->max_riem).epsilon(1e-12));
      CHECK(d.L == doctest::Approx(it->L).epsilon(1e-12));
      CHECK(d.V == doctest::Approx(it->V).epsilon(1e-12));
      CHECK(d.E == doctest::Approx(it->E).epsilon(1e-10));
      CHECK(d.max_energy_density == doctest::Approx(it->max_energy_density).epsilon(1e-12));
    }
  }
}
