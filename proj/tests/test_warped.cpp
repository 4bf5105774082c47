#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "symflow/engine.hpp"
#include "symflow/error.hpp"
#include "symflow/warped.hpp"

using namespace symflow;
namespace gen = symflow::testgen;
using std::numbers::pi;

namespace {

double max_abs(const ScalarField& f) {
  double m = 0;
  for (double v : f) m = std::max(m, std::fabs(v));
  return m;
}

double max_dev(const ScalarField& f, double value) {
  double m = 0;
  for (double v : f) m = std::max(m, std::fabs(v - value));
  return m;
}

WarpedState random_torus(int n) {
  WarpedState s = make_bumpy_torus(n, gen::uniform(-0.3, 0.3));
  const double a = gen::uniform(-0.5, 0.5), b = gen::uniform(-0.5, 0.5);
  auto& t = std::get<TorusMetric>(s.metric);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t k = std::size_t(i) + std::size_t(n) * j;
      const double x = double(i) / n, y = double(j) / n;
      s.u[k] = a * std::cos(2 * pi * x) + b * std::sin(2 * pi * (x + y));
      t.g12[k] = 0.1 * a * std::sin(2 * pi * y) * std::sqrt(t.g11[k] * t.g22[k]);
    }
  return s;
}

}  // namespace

TEST_CASE("flat torus with u = 0 has vanishing curvature and rates") {
  const WarpedState s = make_flat_torus(16, 1.0, 0.0);
  const WarpedCurvature c = curvature_warped(s);
  CHECK(max_abs(c.r_m) == 0.0);
  CHECK(max_abs(c.r_n) == 0.0);
  CHECK(max_abs(c.riem_norm_sq) == 0.0);
  for (FlowMode mode : {FlowMode::Modified, FlowMode::Unmodified}) {
    const WarpedRate r = rhs_warped(s, mode);
    const auto& dg = std::get<TorusMetric>(r.dg);
    CHECK(max_abs(dg.g11) == 0.0);
    CHECK(max_abs(dg.g12) == 0.0);
    CHECK(max_abs(dg.g22) == 0.0);
    CHECK(max_abs(r.du) == 0.0);
  }
  CHECK(gauss_bonnet(s.metric) == 0.0);
}

TEST_CASE("round sphere of radius r has R = 2/r^2 and |Rm|^2 = 4/r^4") {
  for (double r : {1.0, 0.5, 2.0}) {
    const WarpedState s = make_round_sphere(128, r, 0.0, 0.3);
    const WarpedCurvature c = curvature_warped(s);
    CHECK(max_dev(c.r_m, 2 / (r * r)) < 1e-6 / (r * r));
    CHECK(max_dev(c.r_n, 2 / (r * r)) < 1e-6 / (r * r));
    CHECK(max_dev(c.riem_norm_sq, 4 / (r * r * r * r)) < 1e-6 / (r * r * r * r));
    CHECK(area(s.metric) == doctest::Approx(4 * pi * r * r).epsilon(1e-8));
    CHECK(gauss_bonnet(s.metric) == doctest::Approx(8 * pi).epsilon(1e-8));
    CHECK(pole_defect(std::get<SphereProfile>(s.metric)) < 1e-6);
  }
}

TEST_CASE("warped scalar curvature on a flat torus matches -2 Lap u - 2 |grad u|^2") {
  const double eps = 0.01;
  const int n = 64;
  const WarpedState s = make_flat_torus(n, 1.0, eps);
  const WarpedCurvature c = curvature_warped(s);
  CHECK(c.r_n[0] == doctest::Approx(8 * pi * pi * eps).epsilon(1e-6));
  CHECK(c.r_n[0] == doctest::Approx(0.7896).epsilon(1e-4));
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    const double x = double(i) / n;
    const double oracle = 8 * pi * pi * eps * std::cos(2 * pi * x) -
                          8 * pi * pi * eps * eps * std::sin(2 * pi * x) * std::sin(2 * pi * x);
    worst = std::max(worst, std::fabs(c.r_n[std::size_t(i)] - oracle));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("rhs_warped examples") {
  SUBCASE("shrinking unit sphere") {
    const WarpedState s = make_round_sphere(128, 1.0, 0.0, 0.7);
    const WarpedRate r = rhs_warped(s, FlowMode::Modified);
    const auto& p = std::get<SphereProfile>(s.metric);
    const auto& dp = std::get<SphereProfile>(r.dg);
    for (int i = 0; i < p.n; ++i) {
      CHECK(dp.a[std::size_t(i)] == doctest::Approx(-2 * p.a[std::size_t(i)]).epsilon(1e-6));
      // f^2 is g_phiphi, so d(f^2) = -2 f^2 means df = -f
      CHECK(dp.f[std::size_t(i)] ==
            doctest::Approx(-p.f[std::size_t(i)]).epsilon(1e-6).scale(1e-6));
    }
    CHECK(max_abs(r.du) < 1e-12);
  }
  SUBCASE("cosine mode on the flat torus") {
    const double eps = 0.01;
    const WarpedState s = make_flat_torus(64, 1.0, eps);
    const WarpedRate r = rhs_warped(s, FlowMode::Modified);
    CHECK(r.du[0] == doctest::Approx(-4 * pi * pi * eps).epsilon(1e-6));
    CHECK(r.du[0] == doctest::Approx(-0.3948).epsilon(1e-3));
    CHECK(std::fabs(std::get<TorusMetric>(r.dg).g11[0]) < 1e-10);
  }
}

TEST_CASE("gauss_bonnet of a bumpy conformal torus converges to 0 at fourth order") {
  double prev = 0;
  for (int n : {16, 32, 64, 128}) {
    const double gb = std::fabs(gauss_bonnet(make_bumpy_torus(n, 0.2).metric));
    if (n > 16) CHECK(prev / gb > 12);
    CHECK(gb < 1e-2);
    prev = gb;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("lie_gauge_equivalence_probe") {
  SUBCASE("flat torus") {
    const GaugeProbeReport r = lie_gauge_equivalence_probe(make_flat_torus(16, 1, 0), 1e-3);
    CHECK(r.volume_diff == 0.0);
    CHECK(r.max_riem_diff == 0.0);
  }
  SUBCASE("cosine mode, n = 64") {
    const GaugeProbeReport r = lie_gauge_equivalence_probe(make_flat_torus(64, 1, 0.01), 1e-4);
    CHECK(r.volume_diff <= 1e-6);
  }
  SUBCASE("round sphere, u constant: modes coincide") {
    const GaugeProbeReport r = lie_gauge_equivalence_probe(make_round_sphere(64, 1.0), 1e-4);
    CHECK(r.volume_diff < 1e-14);
    CHECK(r.max_riem_diff < 1e-12);
    CHECK(r.total_curvature_diff < 1e-12);
  }
}

TEST_CASE("parabolic rescaling multiplies |Rm|^2 by s^2") {
  for (int trial = 0; trial < 10; ++trial) {
    const WarpedState s = random_torus(24);
    const ScalarField base = curvature_warped(s).riem_norm_sq;
    for (double f : {0.5, 4.0, gen::uniform(0.1, 10)}) {
      for (RescaleKind k : {RescaleKind::Warped2d, RescaleKind::Warped3d}) {
        const ScalarField scaled = curvature_warped(parabolic_rescale(s, f, k)).riem_norm_sq;
        double worst = 0;
        const double ref = *std::max_element(base.begin(), base.end());
        for (std::size_t q = 0; q < base.size(); ++q)
          worst = std::max(worst, std::fabs(scaled[q] - f * f * base[q]));
        CHECK(worst <= 1e-12 * f * f * ref);
      }
    }
  }
  const WarpedState sphere = make_round_sphere(64, 1.3, 0.1);
  const ScalarField b = curvature_warped(sphere).riem_norm_sq;
  const ScalarField sc =
      curvature_warped(parabolic_rescale(sphere, 4.0, RescaleKind::Warped3d)).riem_norm_sq;
  for (std::size_t q = 0; q < b.size(); ++q)
    CHECK(sc[q] == doctest::Approx(16 * b[q]).epsilon(1e-12));
}

TEST_CASE("parabolic rescaling with s = 1 is the identity") {
  const WarpedState s = random_torus(16);
  const WarpedState r = parabolic_rescale(s, 1.0, RescaleKind::Warped3d);
  CHECK(std::get<TorusMetric>(r.metric).g11 == std::get<TorusMetric>(s.metric).g11);
  CHECK(r.u == s.u);
  CHECK(r.time == s.time);
  CHECK_THROWS_AS(parabolic_rescale(s, 0.0, RescaleKind::Warped2d), Error);
  CHECK_THROWS_AS(parabolic_rescale(s, 2.0, RescaleKind::Bundle), Error);
}

TEST_CASE("validation rejects degenerate metrics") {
  WarpedState s = make_flat_torus(16, 1, 0);
  std::get<TorusMetric>(s.metric).g12[3] = 2.0;
  CHECK_THROWS_AS(validate(s), Error);
  WarpedState p = make_round_sphere(32, 1.0);
  std::get<SphereProfile>(p.metric).f[0] *= 3;
  CHECK(pole_defect(std::get<SphereProfile>(p.metric)) > kPoleTolerance);
  CHECK_THROWS_AS(validate(p), Error);
}
