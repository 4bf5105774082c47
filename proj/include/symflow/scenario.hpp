#pragma once

// Orchestration: build the initial state from a RunConfig, integrate, attach
// W_+ where requested, verify, fit and serialize.

#include <optional>
#include <string>
#include <vector>

#include "symflow/config.hpp"
#include "symflow/io.hpp"
#include "symflow/verify.hpp"

namespace symflow {

AnySnapshot initial_state(const RunConfig& c);

TrajectoryContext context_for(const RunConfig& c);

/// Two-sided curvature-decay band for hyperbolic gluing, one-sided otherwise.
FitOptions fit_options_for(const TrajectoryContext& ctx);

struct ScenarioResult {
  RunConfig config;
  StoredTrajectory stored;
  /// Bound checks, then the stop-reason expectation, the conjugate heat mass
  /// (when W_+ was requested) and one entry per requested fit.
  VerificationReport report;
  std::vector<FitReport> fits;
  std::optional<SingularityProfile> singularity;

  StopReason stop_reason() const;
  bool passed() const { return report.passed(); }
};

/// Runs the scenario and writes its outputs when config.output_dir is set.
ScenarioResult run_scenario(const RunConfig& c);

/// Bound checks on a stored trajectory (no fits, no expectation).
VerificationReport verify_stored(const StoredTrajectory& t, const VerifyOptions& opt);

FitReport fit_stored(const StoredTrajectory& t, FitKind kind);

/// Human-readable lines, one per check.
std::string report_text(const VerificationReport& r);
std::string report_json(const ScenarioResult& r);

}  // namespace symflow
