#pragma once

// Serialization of diagnostics, snapshots and whole trajectories.
//
// A trajectory directory holds
//   trajectory.json   manifest: family, topology, mode, gluing, stop reason,
//                     time origin and the snapshot list
//   diagnostics.csv   header row, then one DiagnosticsRecord per stored step
//   snapshots/NNNNN.json
//
// Snapshot schema (JSON): format = "symflow-snapshot", version = 1, kind
// ("warped" | "bundle"), n, time, and per kind
//   warped torus:  topology = "torus", g11, g12, g22, u  (n*n, i + n*j)
//   warped sphere: topology = "sphere-rotsym", a, f, u   (n, staggered)
//   bundle:        gyy, G11, G12, G22 (n), gluing [a, b, c, d],
//                  holonomy [a, b, c, d] or null

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "symflow/engine.hpp"
#include "symflow/verify.hpp"

namespace symflow {

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Throws ErrorKind::Io on a missing or reordered column or a malformed row.
std::vector<DiagnosticsRecord> read_csv(std::istream& in);

std::string snapshot_json(const WarpedState& s);
std::string snapshot_json(const BundleState& s);

using AnySnapshot = std::variant<WarpedState, BundleState>;
/// Throws ErrorKind::Io on schema violations.
AnySnapshot parse_snapshot(std::string_view json);

using AnyTrajectory = std::variant<WarpedTrajectory, BundleTrajectory>;

struct StoredTrajectory {
  AnyTrajectory trajectory;
  TrajectoryContext context;
};

/// Creates `dir` if needed and writes the manifest, CSV and (optionally)
/// snapshots. Existing files of the same names are replaced.
void write_trajectory(const std::string& dir, const StoredTrajectory& t,
                      bool with_snapshots = true);

StoredTrajectory read_trajectory(const std::string& dir);

void write_text(const std::string& path, std::string_view text);
std::string read_text(const std::string& path);

}  // namespace symflow
