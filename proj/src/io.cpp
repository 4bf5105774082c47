#include "symflow/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "symflow/error.hpp"

namespace symflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

double parse_double(std::string_view s, std::size_t row, std::string_view column) {
  double x = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) {
    std::ostringstream os;
    os << "diagnostics row " << row << ", column " << column << ": bad number '" << s << "'";
    fail(ErrorKind::Io, os.str());
  }
  return x;
}

[[noreturn]] void schema(const std::string& what) {
  fail(ErrorKind::Io, "snapshot: " + what);
}

ScalarField field(const json& j, const char* key, std::size_t size) {
  if (!j.contains(key) || !j[key].is_array()) schema(std::string("missing array '") + key + "'");
  ScalarField v = j[key].get<ScalarField>();
  if (v.size() != size) schema(std::string("array '") + key + "' has the wrong length");
  return v;
}

json mat_json(const Mat2& m) { return json::array({m.a, m.b, m.c, m.d}); }

Mat2 mat_from(const json& j) {
  if (!j.is_array() || j.size() != 4) schema("gluing must hold four numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::string topology_tag(Topology t) { return std::string(to_string(t)); }

Topology parse_topology(const std::string& s) {
  if (s == to_string(Topology::Torus)) return Topology::Torus;
  if (s == to_string(Topology::SphereRotsym)) return Topology::SphereRotsym;
  fail(ErrorKind::Io, "unknown topology '" + s + "'");
}

}  // namespace

// CSV -----------------------------------------------------------------------

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  for (std::size_t i = 0; i < kDiagnosticsColumns.size(); ++i)
    out << (i ? "," : "") << kDiagnosticsColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << fmt(r.t) << ',' << fmt(r.dt) << ',' << fmt(r.V) << ',' << fmt(r.E) << ','
        << fmt(r.min_S) << ',' << fmt(r.max_gradu_sq) << ',' << fmt(r.max_riem) << ','
        << fmt(r.gauss_bonnet) << ',' << fmt(r.L) << ',' << fmt(r.detG_min) << ','
        << fmt(r.detG_max) << ',' << fmt(r.max_energy_density) << ','
        << (r.W_plus ? fmt(*r.W_plus) : std::string()) << ',' << fmt(r.u_min) << ','
        << fmt(r.u_max) << '\n';
  }
}

std::vector<DiagnosticsRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, "diagnostics CSV is empty");
  {
    std::vector<std::string> header;
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
    for (std::size_t i = 0; i < kDiagnosticsColumns.size(); ++i) {
      if (i >= header.size())
        fail(ErrorKind::Io, "diagnostics CSV is missing column '" +
                                std::string(kDiagnosticsColumns[i]) + "'");
      if (header[i] != kDiagnosticsColumns[i])
        fail(ErrorKind::Io, "diagnostics CSV column " + std::to_string(i + 1) + " is '" +
                                header[i] + "', expected '" +
                                std::string(kDiagnosticsColumns[i]) + "'");
    }
    if (header.size() != kDiagnosticsColumns.size())
      fail(ErrorKind::Io, "diagnostics CSV has unexpected extra columns");
  }

  std::vector<DiagnosticsRecord> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != kDiagnosticsColumns.size())
      fail(ErrorKind::Io, "diagnostics row " + std::to_string(row) + " has " +
                              std::to_string(cells.size()) + " cells");
    auto num = [&](std::size_t i) { return parse_double(cells[i], row, kDiagnosticsColumns[i]); };
    DiagnosticsRecord r;
    r.t = num(0);
    r.dt = num(1);
    r.V = num(2);
    r.E = num(3);
    r.min_S = num(4);
    r.max_gradu_sq = num(5);
    r.max_riem = num(6);
    r.gauss_bonnet = num(7);
    r.L = num(8);
    r.detG_min = num(9);
    r.detG_max = num(10);
    r.max_energy_density = num(11);
    if (!cells[12].empty()) r.W_plus = num(12);
    r.u_min = num(13);
    r.u_max = num(14);
    out.push_back(r);
  }
  return out;
}

// Snapshots -------------------------------------------------------------------

std::string snapshot_json(const WarpedState& s) {
  json j;
  j["format"] = "symflow-snapshot";
  j["version"] = 1;
  j["kind"] = "warped";
  j["topology"] = topology_tag(topology_of(s.metric));
  j["n"] = grid_size(s.metric);
  j["time"] = s.time;
  if (const auto* t = std::get_if<TorusMetric>(&s.metric)) {
    j["g11"] = t->g11;
    j["g12"] = t->g12;
    j["g22"] = t->g22;
  } else {
    const auto& p = std::get<SphereProfile>(s.metric);
    j["a"] = p.a;
    j["f"] = p.f;
  }
  j["u"] = s.u;
  return j.dump();
}

std::string snapshot_json(const BundleState& s) {
  json j;
  j["format"] = "symflow-snapshot";
  j["version"] = 1;
  j["kind"] = "bundle";
  j["n"] = s.n;
  j["time"] = s.time;
  j["gyy"] = s.gyy;
  ScalarField g11, g12, g22;
  for (const Sym2& g : s.G) {
    g11.push_back(g.xx);
    g12.push_back(g.xy);
    g22.push_back(g.yy);
  }
  j["G11"] = g11;
  j["G12"] = g12;
  j["G22"] = g22;
  j["gluing"] = mat_json(s.gluing);
  if (s.holonomy) {
    const auto& e = s.holonomy->entries();
    j["holonomy"] = json::array({e[0], e[1], e[2], e[3]});
  } else {
    j["holonomy"] = nullptr;
  }
  return j.dump();
}

AnySnapshot parse_snapshot(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "symflow-snapshot") schema("wrong format tag");
    if (j.value("version", 0) != 1) schema("unsupported version");
    const int n = j.at("n").get<int>();
    if (n < 5) schema("grid too small");
    const double time = j.at("time").get<double>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "warped") {
      const Topology topo = parse_topology(j.at("topology").get<std::string>());
      WarpedState s;
      s.time = time;
      if (topo == Topology::Torus) {
        const std::size_t nn = std::size_t(n) * std::size_t(n);
        s.metric = TorusMetric{n, field(j, "g11", nn), field(j, "g12", nn), field(j, "g22", nn)};
        s.u = field(j, "u", nn);
      } else {
        s.metric = SphereProfile{n, field(j, "a", std::size_t(n)), field(j, "f", std::size_t(n))};
        s.u = field(j, "u", std::size_t(n));
      }
      validate(s);
      return s;
    }
    if (kind == "bundle") {
      BundleState s;
      s.n = n;
      s.time = time;
      s.gyy = field(j, "gyy", std::size_t(n));
      const ScalarField g11 = field(j, "G11", std::size_t(n));
      const ScalarField g12 = field(j, "G12", std::size_t(n));
      const ScalarField g22 = field(j, "G22", std::size_t(n));
      for (std::size_t k = 0; k < std::size_t(n); ++k) s.G.push_back({g11[k], g12[k], g22[k]});
      s.gluing = mat_from(j.at("gluing"));
      if (j.contains("holonomy") && !j["holonomy"].is_null()) {
        const auto& h = j["holonomy"];
        if (!h.is_array() || h.size() != 4) schema("holonomy must hold four integers");
        s.holonomy = Holonomy(h[0].get<long>(), h[1].get<long>(), h[2].get<long>(),
                              h[3].get<long>());
      }
      validate(s);
      return s;
    }
    schema("unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    schema(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    schema(e.what());
  }
}

// Trajectory directories ----------------------------------------------------------

void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_trajectory(const std::string& dir, const StoredTrajectory& st,
                      bool with_snapshots) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "snapshots", ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + dir + "': " + ec.message());

  const TrajectoryContext& ctx = st.context;
  json m;
  m["format"] = "symflow-trajectory";
  m["version"] = 1;
  m["family"] = std::string(to_string(ctx.family));
  m["topology"] = topology_tag(ctx.topology);
  m["mode"] = std::string(to_string(ctx.mode));
  m["gluing"] = mat_json(ctx.gluing);
  if (ctx.holonomy) {
    const auto& e = ctx.holonomy->entries();
    m["holonomy"] = json::array({e[0], e[1], e[2], e[3]});
  } else {
    m["holonomy"] = nullptr;
  }
  m["time_origin"] = ctx.time_origin ? json(*ctx.time_origin) : json(nullptr);
  m["diagnostics"] = "diagnostics.csv";

  std::visit(
      [&](const auto& tr) {
        m["stop_reason"] = std::string(to_string(tr.stop_reason));
        m["accepted_steps"] = tr.accepted_steps;
        m["rejected_steps"] = tr.rejected_steps;
        json snaps = json::array();
        if (with_snapshots) {
          for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "snapshots/%05zu.json", i);
            write_text((fs::path(dir) / name).string(), snapshot_json(tr.snapshots[i]));
            snaps.push_back({{"file", name}, {"time", tr.snapshots[i].time}});
          }
        }
        m["snapshots"] = snaps;
        std::ostringstream csv;
        write_csv(csv, tr.records);
        write_text((fs::path(dir) / "diagnostics.csv").string(), csv.str());
      },
      st.trajectory);
  write_text((fs::path(dir) / "trajectory.json").string(), m.dump(2) + "\n");
}

StoredTrajectory read_trajectory(const std::string& dir) {
  json m;
  try {
    m = json::parse(read_text((fs::path(dir) / "trajectory.json").string()));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("trajectory manifest: ") + e.what());
  }
  StoredTrajectory st;
  try {
    if (m.value("format", "") != "symflow-trajectory")
      fail(ErrorKind::Io, "trajectory manifest: wrong format tag");
    TrajectoryContext& ctx = st.context;
    const std::string family = m.at("family").get<std::string>();
    if (family == "warped") ctx.family = Family::Warped;
    else if (family == "bundle") ctx.family = Family::Bundle;
    else fail(ErrorKind::Io, "trajectory manifest: unknown family '" + family + "'");
    ctx.topology = parse_topology(m.at("topology").get<std::string>());
    ctx.mode = m.at("mode").get<std::string>() == "unmodified" ? FlowMode::Unmodified
                                                                : FlowMode::Modified;
    ctx.gluing = mat_from(m.at("gluing"));
    if (!m["holonomy"].is_null()) {
      const auto& h = m["holonomy"];
      ctx.holonomy = Holonomy(h[0].get<long>(), h[1].get<long>(), h[2].get<long>(),
                              h[3].get<long>());
    }
    if (!m["time_origin"].is_null()) ctx.time_origin = m["time_origin"].get<double>();

    std::ifstream csv(fs::path(dir) / m.at("diagnostics").get<std::string>());
    if (!csv) fail(ErrorKind::Io, "cannot read diagnostics in '" + dir + "'");
    auto records = read_csv(csv);

    const std::string stop = m.at("stop_reason").get<std::string>();
    StopReason reason = StopReason::ReachedTEnd;
    for (StopReason r : {StopReason::ReachedTEnd, StopReason::CurvatureBlowup,
                         StopReason::StepUnderflow})
      if (stop == to_string(r)) reason = r;

    auto fill = [&](auto tr) {
      tr.mode = ctx.mode;
      tr.records = std::move(records);
      tr.stop_reason = reason;
      tr.accepted_steps = m.value("accepted_steps", std::size_t(0));
      tr.rejected_steps = m.value("rejected_steps", std::size_t(0));
      using State = typename decltype(tr.snapshots)::value_type;
      for (const auto& s : m.at("snapshots")) {
        const std::string file = s.at("file").get<std::string>();
        AnySnapshot snap = parse_snapshot(read_text((fs::path(dir) / file).string()));
        if (!std::holds_alternative<State>(snap))
          fail(ErrorKind::Io, "snapshot '" + file + "' does not match the trajectory family");
        tr.snapshots.push_back(std::get<State>(std::move(snap)));
      }
      return tr;
    };
    if (ctx.family == Family::Warped)
      st.trajectory = fill(WarpedTrajectory{});
    else
      st.trajectory = fill(BundleTrajectory{});
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("trajectory manifest: ") + e.what());
  }
  return st;
}

}  // namespace symflow
