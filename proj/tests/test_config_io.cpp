#include <doctest.h>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "symflow/config.hpp"
#include "symflow/error.hpp"
#include "symflow/io.hpp"

using namespace symflow;
namespace gen = symflow::testgen;
namespace fs = std::filesystem;

namespace {

std::string error_of(auto&& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("symflow_test_" + name);
  fs::remove_all(p);
  return p;
}

DiagnosticsRecord random_record() {
  DiagnosticsRecord r;
  for (double* f : {&r.t, &r.dt, &r.V, &r.E, &r.min_S, &r.max_gradu_sq, &r.max_riem,
                    &r.gauss_bonnet, &r.L, &r.detG_min, &r.detG_max, &r.max_energy_density,
                    &r.u_min, &r.u_max})
    *f = gen::uniform(-1, 1) * std::pow(10.0, double(gen::integer(-12, 12)));
  if (gen::integer(0, 1)) r.W_plus = gen::uniform(-2, 2) / 3;
  return r;
}

}  // namespace

TEST_CASE("every preset round-trips through its text form") {
  for (std::string_view name : preset_names()) {
    const RunConfig c = preset(name);
    CHECK_NOTHROW(validate(c));
    const std::string text = serialize_config(c);
    const std::string again = serialize_config(parse_config(text));
    CHECK(text == again);
    CHECK(serialize_config(parse_config(again)) == again);
  }
}

TEST_CASE("serialization is idempotent under random overrides") {
  const char* keys[] = {"grid.n", "controller.cfl", "controller.t_end", "bundle.eps",
                        "verify.bound_tolerance", "warped.amplitude"};
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c = preset(preset_names()[std::size_t(gen::integer(0, 7))]);
    const std::string key = keys[gen::integer(0, 5)];
    std::ostringstream v;
    if (key == "grid.n")
      v << gen::integer(16, 128);
    else
      v << gen::uniform(0.01, 0.3);
    if (key == "controller.t_end") v.str(std::to_string(c.controller.t_end + 1.0 / 3));
    apply_override(c, key + "=" + v.str());
    const std::string text = serialize_config(c);
    CHECK(serialize_config(parse_config(text)) == text);
  }
}

TEST_CASE("parse_config applies the preset first, then keys in any order") {
  const RunConfig a = parse_config("[grid]\nn = 48\n[scenario]\npreset = sol-exact\n");
  CHECK(a.n == 48);
  CHECK(a.initial == InitialKind::SolSlice);
  const RunConfig b = parse_config("# comment\n[scenario]\npreset = sol-exact\n[grid]\nn = 48\n");
  CHECK(serialize_config(a) == serialize_config(b));
}

TEST_CASE("parse_config rejects malformed input with the line number") {
  CHECK(error_of([] { parse_config("[grid]\nn = 32\nbogus = 1\n"); }).find("line 3") !=
        std::string::npos);
  CHECK(error_of([] { parse_config("[nowhere]\nn = 32\n"); }).find("line") !=
        std::string::npos);
  CHECK(error_of([] { parse_config("[grid]\nn = 32\nn = 64\n"); }).find("line 3") !=
        std::string::npos);
  CHECK(error_of([] { parse_config("[grid]\nn 32\n"); }).find("line 2") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[grid]\nn = 3\n"), Error);
  CHECK_THROWS_AS(parse_config("[controller]\ncfl = -1\n"), Error);
  CHECK_THROWS_AS(parse_config("[scenario]\npreset = nope\n"), Error);
  CHECK_THROWS_AS(parse_config("[bundle]\nholonomy = 2 0 0 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[grid]\nn = 32x\n"), Error);
}

TEST_CASE("apply_override") {
  RunConfig c = preset("sol-hyperbolic");
  apply_override(c, "grid.n=64");
  CHECK(c.n == 64);
  apply_override(c, "bundle.holonomy = 3 2 1 1");
  CHECK(c.holonomy == std::array<long, 4>{3, 2, 1, 1});
  CHECK_THROWS_AS(apply_override(c, "grid.m=1"), Error);
  CHECK_THROWS_AS(apply_override(c, "n=1"), Error);
  const RunConfig before = c;
  CHECK_THROWS_AS(apply_override(c, "controller.cfl=0"), Error);
}

TEST_CASE("CSV header is the fixed column list") {
  std::ostringstream os;
  write_csv(os, {});
  std::string expected;
  for (std::size_t i = 0; i < kDiagnosticsColumns.size(); ++i)
    expected += (i ? "," : "") + std::string(kDiagnosticsColumns[i]);
  CHECK(os.str() == expected + "\n");
}

TEST_CASE("CSV round-trips records bit for bit") {
  std::vector<DiagnosticsRecord> rs;
  for (int k = 0; k < 100; ++k) rs.push_back(random_record());
  std::ostringstream os;
  write_csv(os, rs);
  std::istringstream is(os.str());
  const auto back = read_csv(is);
  REQUIRE(back.size() == rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) {
    CHECK(same_bits(back[k].t, rs[k].t));
    CHECK(same_bits(back[k].max_riem, rs[k].max_riem));
    CHECK(same_bits(back[k].u_max, rs[k].u_max));
    CHECK(back[k].W_plus.has_value() == rs[k].W_plus.has_value());
    if (rs[k].W_plus) CHECK(same_bits(*back[k].W_plus, *rs[k].W_plus));
  }
}

TEST_CASE("CSV rejects missing or reordered columns") {
  std::ostringstream os;
  write_csv(os, {random_record()});
  const std::string text = os.str();
  {
    std::string t = text;
    t.replace(0, 2, "");  // drop "t,"
    std::istringstream is(t);
    CHECK_THROWS_AS(read_csv(is), Error);
  }
  {
    std::string t = text;
    t.replace(0, 4, "dt,t");
    std::istringstream is(t);
    CHECK_THROWS_AS(read_csv(is), Error);
  }
  {
    std::string t = text;
    t.resize(t.rfind(','));
    std::istringstream is(t);
    CHECK_THROWS_AS(read_csv(is), Error);
  }
}

TEST_CASE("snapshot JSON round trips") {
  const WarpedState torus = make_bumpy_torus(8, 0.2);
  const WarpedState sphere = make_round_sphere(16, 1.3, 0.05);
  BundleInit init;
  init.eps = 0.2;
  const BundleState bundle = make_bundle(16, Holonomy(2, 1, 1, 1), init);

  const auto t = std::get<WarpedState>(parse_snapshot(snapshot_json(torus)));
  CHECK(std::get<TorusMetric>(t.metric).g11 == std::get<TorusMetric>(torus.metric).g11);
  CHECK(t.u == torus.u);
  const auto s = std::get<WarpedState>(parse_snapshot(snapshot_json(sphere)));
  CHECK(std::get<SphereProfile>(s.metric).f == std::get<SphereProfile>(sphere.metric).f);
  const auto b = std::get<BundleState>(parse_snapshot(snapshot_json(bundle)));
  CHECK(b.gyy == bundle.gyy);
  for (int k = 0; k < 16; ++k) CHECK(max_abs_diff(b.G[k], bundle.G[k]) == 0.0);
  REQUIRE(b.holonomy);
  CHECK(*b.holonomy == *bundle.holonomy);

  CHECK_THROWS_AS(parse_snapshot("{}"), Error);
  CHECK_THROWS_AS(parse_snapshot("not json"), Error);
  CHECK_THROWS_AS(parse_snapshot(R"({"format":"symflow-snapshot","version":1,"kind":"bundle",)"
                                 R"("n":5,"time":0,"gyy":[1,1],"G11":[],"G12":[],"G22":[],)"
                                 R"("gluing":[1,0,0,1],"holonomy":null})"),
                  Error);
}

TEST_CASE("trajectory directories round trip") {
  StepController c;
  c.t_end = 0.2;
  c.snapshot_interval = 0.1;
  StoredTrajectory st;
  st.trajectory = run(make_flat_torus(8, 1.0, 0.05), c, FlowMode::Modified);
  st.context.family = Family::Warped;
  st.context.topology = Topology::Torus;
  st.context.time_origin = 0.0;

  const fs::path dir = scratch("roundtrip");
  write_trajectory(dir.string(), st);
  CHECK(fs::exists(dir / "trajectory.json"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
  const StoredTrajectory back = read_trajectory(dir.string());
  const auto& a = std::get<WarpedTrajectory>(st.trajectory);
  const auto& b = std::get<WarpedTrajectory>(back.trajectory);
  CHECK(b.records.size() == a.records.size());
  CHECK(b.snapshots.size() == a.snapshots.size());
  CHECK(b.stop_reason == a.stop_reason);
  CHECK(b.accepted_steps == a.accepted_steps);
  CHECK(back.context.topology == Topology::Torus);
  REQUIRE(back.context.time_origin);
  CHECK(*back.context.time_origin == 0.0);
  for (std::size_t k = 0; k < a.records.size(); ++k)
    CHECK(same_bits(a.records[k].E, b.records[k].E));
  fs::remove_all(dir);

  CHECK_THROWS_AS(read_trajectory(scratch("missing").string()), Error);
}
