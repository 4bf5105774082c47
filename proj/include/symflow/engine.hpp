#pragma once

// Explicit RK4 time integration with curvature-aware step control.
//
// The step size is dt = cfl * s^2 / (1 + max|Rm| * s^2), where s is the
// smallest physical grid spacing, then clipped to dt_max and to the next
// snapshot or end time. A step producing an invalid state (non-SPD metric,
// nonpositive g_yy, pole defect, non-finite values) is retried with half the
// step; a step below dt_min ends the run with step_underflow.

#include <string_view>
#include <vector>

#include "symflow/bundle.hpp"
#include "symflow/functionals.hpp"
#include "symflow/warped.hpp"

namespace symflow {

enum class StopReason { ReachedTEnd, CurvatureBlowup, StepUnderflow };
std::string_view to_string(StopReason r);

struct StepController {
  double cfl = 0.2;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  double curvature_stop = 1e6;  ///< blowup threshold on max |Rm|
  double t_end = 1.0;
  /// Snapshot cadence in time; 0 stores only the first and last states.
  double snapshot_interval = 0;
  /// Extra snapshot whenever max |Rm| has grown by this factor since the last
  /// one; 0 disables.
  double snapshot_growth = 0;
  /// Keep every k-th accepted record (the first and last are always kept).
  int record_stride = 1;
};

/// Throws ErrorKind::Config on inconsistent settings.
void validate(const StepController& c);

template <class State>
struct Trajectory {
  FlowMode mode = FlowMode::Modified;
  std::vector<DiagnosticsRecord> records;
  std::vector<State> snapshots;
  StopReason stop_reason = StopReason::ReachedTEnd;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

using WarpedTrajectory = Trajectory<WarpedState>;
using BundleTrajectory = Trajectory<BundleState>;

struct StepOutcome {
  bool accepted = false;  ///< false means dt fell below dt_min
  double dt = 0;
  int halvings = 0;
};

/// Proposed step size for the current state.
double proposed_dt(double spacing_sq, double max_riem, const StepController& c);

/// One accepted RK4 step of at most `dt`, halving on invalid results. On
/// success `s` is replaced by the new state.
StepOutcome step(WarpedState& s, double dt, const StepController& c, FlowMode mode);
StepOutcome step(BundleState& s, double dt, const StepController& c, FlowMode mode);

WarpedTrajectory run(const WarpedState& initial, const StepController& c, FlowMode mode);
BundleTrajectory run(const BundleState& initial, const StepController& c, FlowMode mode);

// Parabolic rescaling ---------------------------------------------------------

enum class RescaleKind { Warped2d, Warped3d, Bundle };
std::string_view to_string(RescaleKind k);

/// The state at time t of the rescaled flow built from the stored slice at
/// time s * t: metric divided by s (bundle: only g_yy), u unchanged (2d) or
/// shifted by -1/2 ln s (3d), time divided by s.
WarpedState parabolic_rescale(const WarpedState& s, double factor, RescaleKind kind);
BundleState parabolic_rescale(const BundleState& s, double factor);

/// Rescales every snapshot and record of a trajectory.
WarpedTrajectory parabolic_rescale(const WarpedTrajectory& t, double factor,
                                   RescaleKind kind);
BundleTrajectory parabolic_rescale(const BundleTrajectory& t, double factor);

// Singularity analysis --------------------------------------------------------

struct SingularityProfile {
  double t_singular = 0;  ///< extrapolated blowup time T
  /// Range of (T - t) max R^N over snapshots in the last decade of growth.
  double normalized_min = 0;
  double normalized_max = 0;
  /// sup K / inf K of the base at the last snapshot.
  double roundness = 0;
  /// max u - min u at the last snapshot.
  double u_oscillation = 0;
  std::size_t fit_samples = 0;
  std::size_t profile_samples = 0;
};

/// Fits 1 / max|Rm| linearly in t over the last decade of curvature growth to
/// locate T, then evaluates the normalized curvature on stored snapshots.
/// Throws ErrorKind::InvalidArgument unless the run ended in a blowup.
SingularityProfile singularity_profile(const WarpedTrajectory& t);

}  // namespace symflow
