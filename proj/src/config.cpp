#include "symflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "symflow/error.hpp"

namespace symflow {

std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::FlatTorus: return "flat-torus";
    case InitialKind::BumpyTorus: return "bumpy-torus";
    case InitialKind::RoundSphere: return "round-sphere";
    case InitialKind::SolSlice: return "sol-slice";
    case InitialKind::Holonomy: return "holonomy";
  }
  return "?";
}

Family RunConfig::family() const {
  return initial == InitialKind::SolSlice || initial == InitialKind::Holonomy
             ? Family::Bundle
             : Family::Warped;
}

// Presets -----------------------------------------------------------------------

const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names = {
      "sphere-collapse", "sphere-perturbed", "flat-torus-warped", "sol-exact",
      "sol-hyperbolic",  "sol-entropy",      "elliptic-bundle",   "parabolic-bundle"};
  return names;
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  StepController& k = c.controller;
  if (name == "custom") return c;

  if (name == "sphere-collapse" || name == "sphere-perturbed") {
    c.initial = InitialKind::RoundSphere;
    c.n = 128;
    c.radius = 1.0;
    c.amplitude = name == "sphere-perturbed" ? 0.05 : 0.0;
    k.cfl = 0.4;
    k.t_end = 1.0;
    k.snapshot_interval = 0.05;
    k.snapshot_growth = std::pow(10.0, 0.1);
    c.expect_stop = StopReason::CurvatureBlowup;
    return c;
  }
  if (name == "flat-torus-warped") {
    c.initial = InitialKind::FlatTorus;
    c.n = 32;
    c.side = 8.0;
    c.amplitude = 0.1;
    k.cfl = 0.2;
    k.t_end = 50.0;
    k.snapshot_interval = 1.0;
    c.expect_stop = StopReason::ReachedTEnd;
    c.fits = {FitKind::ExpFlat, FitKind::CurvatureDecay};
    return c;
  }
  if (name == "sol-exact") {
    c.initial = InitialKind::SolSlice;
    c.n = 256;
    c.sol_c = 1.0;
    c.sol_a = 0.0;
    c.bundle.t0 = 1.0;
    c.time_origin = 0.0;
    k.cfl = 0.4;
    k.t_end = 2.0;
    k.snapshot_interval = 0.1;
    c.expect_stop = StopReason::ReachedTEnd;
    c.fits = {FitKind::CurvatureDecay};
    return c;
  }
  if (name == "sol-hyperbolic" || name == "sol-entropy") {
    c.initial = InitialKind::Holonomy;
    c.holonomy = {2, 1, 1, 1};
    c.bundle.gyy0 = 1.0;
    c.bundle.eps = 0.3;
    c.bundle.delta = 0.1;
    c.bundle.eps_g = 0.2;
    k.cfl = 0.4;
    c.expect_stop = StopReason::ReachedTEnd;
    if (name == "sol-hyperbolic") {
      c.n = 256;
      k.t_end = 100.0;
      k.snapshot_interval = 1.0;
      k.record_stride = 10;
      c.fits = {FitKind::SolPower, FitKind::CurvatureDecay};
    } else {
      c.n = 128;
      k.t_end = 10.0;
      k.snapshot_interval = 0.01;
      c.w_plus = true;
      c.w_plus_from = 1.0;
      c.write_snapshots = false;
    }
    return c;
  }
  if (name == "elliptic-bundle") {
    c.initial = InitialKind::Holonomy;
    c.holonomy = {0, -1, 1, 0};
    c.n = 64;
    c.bundle.gyy0 = 16.0;
    c.bundle.eps = 0.3;
    c.bundle.delta = 0.1;
    c.bundle.eps_g = 0.2;
    k.cfl = 0.4;
    k.t_end = 20.0;
    k.snapshot_interval = 1.0;
    c.expect_stop = StopReason::ReachedTEnd;
    c.fits = {FitKind::ExpFlat, FitKind::CurvatureDecay};
    return c;
  }
  if (name == "parabolic-bundle") {
    c.initial = InitialKind::Holonomy;
    c.holonomy = {1, 1, 0, 1};
    c.n = 64;
    c.bundle.gyy0 = 1.0;
    c.bundle.eps = 0.3;
    c.bundle.delta = 0.1;
    c.bundle.eps_g = 0.2;
    k.cfl = 0.4;
    k.t_end = 50.0;
    k.snapshot_interval = 1.0;
    k.record_stride = 10;
    c.expect_stop = StopReason::ReachedTEnd;
    c.fits = {FitKind::GrowthExponent, FitKind::CurvatureDecay};
    return c;
  }
  fail(ErrorKind::Config, "unknown preset '" + std::string(name) + "'");
}

// Key registry --------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    fail(ErrorKind::Config, "expected a finite number, got '" + v + "'");
  return x;
}

long to_long(const std::string& v) {
  long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(ErrorKind::Config, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(ErrorKind::Config, "expected true or false, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

struct Key {
  std::string_view section, name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define SYMFLOW_DOUBLE(sec, key, field)                                        \
  Key {                                                                          \
    sec, key, [](const RunConfig& c) { return fmt(c.field); },                   \
        [](RunConfig& c, const std::string& v) { c.field = to_double(v); }       \
  }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      {"scenario", "preset", [](const RunConfig& c) { return c.preset; },
       [](RunConfig& c, const std::string& v) { c.preset = v; }},
      {"scenario", "initial", [](const RunConfig& c) { return std::string(to_string(c.initial)); },
       [](RunConfig& c, const std::string& v) {
         for (InitialKind k : {InitialKind::FlatTorus, InitialKind::BumpyTorus,
                               InitialKind::RoundSphere, InitialKind::SolSlice,
                               InitialKind::Holonomy})
           if (v == to_string(k)) {
             c.initial = k;
             return;
           }
         fail(ErrorKind::Config, "unknown initial data '" + v + "'");
       }},
      {"scenario", "mode", [](const RunConfig& c) { return std::string(to_string(c.mode)); },
       [](RunConfig& c, const std::string& v) {
         if (v == "modified") c.mode = FlowMode::Modified;
         else if (v == "unmodified") c.mode = FlowMode::Unmodified;
         else fail(ErrorKind::Config, "mode must be modified or unmodified");
       }},
      {"scenario", "expect_stop",
       [](const RunConfig& c) {
         return c.expect_stop ? std::string(to_string(*c.expect_stop)) : std::string("none");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "none") {
           c.expect_stop.reset();
           return;
         }
         for (StopReason r : {StopReason::ReachedTEnd, StopReason::CurvatureBlowup,
                              StopReason::StepUnderflow})
           if (v == to_string(r)) {
             c.expect_stop = r;
             return;
           }
         fail(ErrorKind::Config, "unknown stop reason '" + v + "'");
       }},
      {"grid", "n", [](const RunConfig& c) { return std::to_string(c.n); },
       [](RunConfig& c, const std::string& v) { c.n = int(to_long(v)); }},
      SYMFLOW_DOUBLE("warped", "side", side),
      SYMFLOW_DOUBLE("warped", "radius", radius),
      SYMFLOW_DOUBLE("warped", "amplitude", amplitude),
      SYMFLOW_DOUBLE("warped", "u0", u0),
      SYMFLOW_DOUBLE("warped", "bump", bump),
      {"bundle", "holonomy",
       [](const RunConfig& c) {
         std::ostringstream os;
         os << c.holonomy[0] << ' ' << c.holonomy[1] << ' ' << c.holonomy[2] << ' '
            << c.holonomy[3];
         return os.str();
       },
       [](RunConfig& c, const std::string& v) {
         const auto parts = split(v, ' ');
         if (parts.size() != 4) fail(ErrorKind::Config, "holonomy needs four integers");
         for (int i = 0; i < 4; ++i) c.holonomy[std::size_t(i)] = to_long(parts[std::size_t(i)]);
       }},
      SYMFLOW_DOUBLE("bundle", "gyy0", bundle.gyy0),
      SYMFLOW_DOUBLE("bundle", "eps", bundle.eps),
      SYMFLOW_DOUBLE("bundle", "delta", bundle.delta),
      SYMFLOW_DOUBLE("bundle", "eps_g", bundle.eps_g),
      SYMFLOW_DOUBLE("bundle", "t0", bundle.t0),
      SYMFLOW_DOUBLE("bundle", "sol_c", sol_c),
      SYMFLOW_DOUBLE("bundle", "sol_a", sol_a),
      SYMFLOW_DOUBLE("controller", "cfl", controller.cfl),
      SYMFLOW_DOUBLE("controller", "dt_min", controller.dt_min),
      SYMFLOW_DOUBLE("controller", "dt_max", controller.dt_max),
      SYMFLOW_DOUBLE("controller", "curvature_stop", controller.curvature_stop),
      SYMFLOW_DOUBLE("controller", "t_end", controller.t_end),
      SYMFLOW_DOUBLE("controller", "snapshot_interval", controller.snapshot_interval),
      SYMFLOW_DOUBLE("controller", "snapshot_growth", controller.snapshot_growth),
      {"controller", "record_stride",
       [](const RunConfig& c) { return std::to_string(c.controller.record_stride); },
       [](RunConfig& c, const std::string& v) { c.controller.record_stride = int(to_long(v)); }},
      {"output", "dir", [](const RunConfig& c) { return c.output_dir; },
       [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output", "snapshots", [](const RunConfig& c) { return std::string(c.write_snapshots ? "true" : "false"); },
       [](RunConfig& c, const std::string& v) { c.write_snapshots = to_bool(v); }},
      SYMFLOW_DOUBLE("verify", "bound_tolerance", verify.bound_tolerance),
      SYMFLOW_DOUBLE("verify", "bound_t_min", verify.bound_t_min),
      SYMFLOW_DOUBLE("verify", "monotone_tolerance", verify.monotone_tolerance),
      SYMFLOW_DOUBLE("verify", "identity_tolerance", verify.identity_tolerance),
      SYMFLOW_DOUBLE("verify", "dissipation_tolerance", verify.dissipation_tolerance),
      SYMFLOW_DOUBLE("verify", "lemma_t_min", verify.lemma_t_min),
      SYMFLOW_DOUBLE("verify", "length_t_min", verify.length_t_min),
      SYMFLOW_DOUBLE("verify", "length_factor", verify.length_factor),
      SYMFLOW_DOUBLE("verify", "w_plus_tolerance", verify.w_plus_tolerance),
      SYMFLOW_DOUBLE("verify", "mass_tolerance", verify.mass_tolerance),
      {"verify", "w_plus", [](const RunConfig& c) { return std::string(c.w_plus ? "true" : "false"); },
       [](RunConfig& c, const std::string& v) { c.w_plus = to_bool(v); }},
      SYMFLOW_DOUBLE("verify", "w_plus_from", w_plus_from),
      {"verify", "time_origin",
       [](const RunConfig& c) { return c.time_origin ? fmt(*c.time_origin) : std::string("none"); },
       [](RunConfig& c, const std::string& v) {
         if (v == "none") c.time_origin.reset();
         else c.time_origin = to_double(v);
       }},
      {"verify", "fits",
       [](const RunConfig& c) {
         std::string s;
         for (FitKind k : c.fits) {
           if (!s.empty()) s += ", ";
           s += to_string(k);
         }
         return s.empty() ? std::string("none") : s;
       },
       [](RunConfig& c, const std::string& v) {
         c.fits.clear();
         if (v == "none") return;
         for (const auto& part : split(v, ',')) c.fits.push_back(parse_fit_kind(part));
       }},
  };
  return keys;
}

#undef SYMFLOW_DOUBLE

const Key& lookup(std::string_view section, std::string_view name) {
  for (const Key& k : registry())
    if (k.section == section && k.name == name) return k;
  fail(ErrorKind::Config, "unknown key '" + std::string(name) + "' in section [" +
                              std::string(section) + "]");
}

bool known_section(std::string_view s) {
  for (const Key& k : registry())
    if (k.section == s) return true;
  return false;
}

struct Assignment {
  std::string section, key, value;
  int line;
};

std::vector<Assignment> tokenize(std::string_view text) {
  std::vector<Assignment> out;
  std::string section;
  std::istringstream is{std::string(text)};
  std::string raw;
  int line = 0;
  auto error = [&line](const std::string& what) {
    fail(ErrorKind::Config, "line " + std::to_string(line) + ": " + what);
  };
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') error("malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!known_section(section)) error("unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) error("expected key = value");
    if (section.empty()) error("key outside of any section");
    Assignment a{section, trim(std::string_view(body).substr(0, eq)),
                 trim(std::string_view(body).substr(eq + 1)), line};
    for (const auto& prev : out)
      if (prev.section == a.section && prev.key == a.key)
        error("duplicate key '" + a.key + "'");
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

void validate(const RunConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorKind::Config, what); };
  if (c.n < 8 || c.n > 4096) bad("grid.n must lie in [8, 4096]");
  validate(c.controller);
  const auto& h = c.holonomy;
  if (h[0] * h[3] - h[1] * h[2] != 1) bad("bundle.holonomy must have determinant 1");
  if (c.family() == Family::Warped) {
    if (!(c.side > 0)) bad("warped.side must be positive");
    if (!(c.radius > 0)) bad("warped.radius must be positive");
  } else {
    if (c.initial == InitialKind::Holonomy) {
      if (!(c.bundle.gyy0 > 0)) bad("bundle.gyy0 must be positive");
      if (!(std::fabs(c.bundle.eps_g) < 1)) bad("bundle.eps_g must lie in (-1, 1)");
    } else {
      if (!(c.sol_c > 0)) bad("bundle.sol_c must be positive");
      if (!(c.bundle.t0 + c.sol_a > 0)) bad("Sol slice needs t0 + sol_a > 0");
    }
    if (!(c.bundle.t0 >= 0)) bad("bundle.t0 must be nonnegative");
  }
  if (c.w_plus && c.family() != Family::Bundle) bad("verify.w_plus needs a bundle run");
  if (c.w_plus && c.mode != FlowMode::Modified) bad("verify.w_plus needs the modified flow");
  if (c.w_plus && !(c.w_plus_from > 0)) bad("verify.w_plus_from must be positive");
}

RunConfig parse_config(std::string_view text) {
  const auto items = tokenize(text);
  std::string base = "custom";
  for (const auto& a : items)
    if (a.section == "scenario" && a.key == "preset") base = a.value;
  RunConfig c = preset(base);
  for (const auto& a : items) {
    try {
      lookup(a.section, a.key).set(c, a.value);
    } catch (const Error& e) {
      fail(ErrorKind::Config, "line " + std::to_string(a.line) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  std::string_view section;
  for (const Key& k : registry()) {
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << k.get(c) << '\n';
  }
  return os.str();
}

void apply_override(RunConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
    fail(ErrorKind::Config, "override must look like section.key=value");
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(assignment.substr(eq + 1));
  if (section == "scenario" && key == "preset") {
    c = preset(value);
  } else {
    lookup(section, key).set(c, value);
  }
  validate(c);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace symflow
