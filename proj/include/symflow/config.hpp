#pragma once

// Run configuration: a plain-text file of [section] headers and key = value
// lines, '#' starting a comment. A preset named in [scenario] supplies the
// defaults and every other key overrides it, regardless of order. Unknown
// sections and keys are rejected with their line number.
//
//   [scenario]  preset, initial, mode, expect_stop
//   [grid]      n
//   [warped]    side, radius, amplitude, u0, bump
//   [bundle]    holonomy (four integers), gyy0, eps, delta, eps_g, t0,
//               sol_c, sol_a
//   [controller] cfl, dt_min, dt_max, curvature_stop, t_end,
//               snapshot_interval, snapshot_growth, record_stride
//   [output]    dir, snapshots
//   [verify]    bound_tolerance, bound_t_min, monotone_tolerance,
//               identity_tolerance, dissipation_tolerance, lemma_t_min,
//               length_t_min, length_factor, w_plus, w_plus_from,
//               w_plus_tolerance, mass_tolerance, time_origin, fits

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symflow/bundle.hpp"
#include "symflow/engine.hpp"
#include "symflow/verify.hpp"

namespace symflow {

/// Initial data families.
enum class InitialKind { FlatTorus, BumpyTorus, RoundSphere, SolSlice, Holonomy };
std::string_view to_string(InitialKind k);

struct RunConfig {
  std::string preset = "custom";
  InitialKind initial = InitialKind::FlatTorus;
  FlowMode mode = FlowMode::Modified;
  std::optional<StopReason> expect_stop;
  int n = 32;

  // Warped initial data.
  double side = 1.0;
  double radius = 1.0;
  double amplitude = 0.0;
  double u0 = 0.0;
  double bump = 0.0;

  // Bundle initial data.
  std::array<long, 4> holonomy{1, 0, 0, 1};
  BundleInit bundle;
  double sol_c = 1.0;
  double sol_a = 0.0;

  StepController controller;

  std::string output_dir;  ///< empty: nothing written
  bool write_snapshots = true;

  VerifyOptions verify;
  bool w_plus = false;
  double w_plus_from = 1.0;
  std::optional<double> time_origin;
  std::vector<FitKind> fits;

  Family family() const;
};

/// Names of the built-in presets, in a stable order.
const std::vector<std::string_view>& preset_names();

/// Throws ErrorKind::Config for an unknown name.
RunConfig preset(std::string_view name);

/// Throws ErrorKind::Config with the line number on malformed input, unknown
/// keys or out-of-range values.
RunConfig parse_config(std::string_view text);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& c);

/// Applies one "section.key=value" override.
void apply_override(RunConfig& c, std::string_view assignment);

/// Range and consistency checks shared by the parser and the overrides.
void validate(const RunConfig& c);

RunConfig load_config(const std::string& path);

}  // namespace symflow
