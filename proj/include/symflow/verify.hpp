#pragma once

// A-priori bound and identity checks over stored diagnostics, plus the
// asymptotic fits.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symflow/engine.hpp"
#include "symflow/functionals.hpp"
#include "symflow/holonomy.hpp"

namespace symflow {

enum class CheckStatus { Pass, Fail, NotApplicable };
std::string_view to_string(CheckStatus s);

/// Margins are signed so that a negative value is a violation of the bound
/// before tolerance; `status` already accounts for the tolerance.
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  double worst_margin = 0;
  double time_of_worst = 0;
  /// Diagnostic checks are reported but never fail a report.
  bool diagnostic = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(std::string_view name) const;
};

enum class Family { Warped, Bundle };
std::string_view to_string(Family f);

/// What the checks need to know about the run beyond its records.
struct TrajectoryContext {
  Family family = Family::Warped;
  Topology topology = Topology::Torus;
  std::optional<Holonomy> holonomy;
  /// Real gluing matrix (bundle runs); may be non-integer for Sol slices.
  Mat2 gluing = Mat2::identity();
  FlowMode mode = FlowMode::Modified;
  /// Time at which the a-priori bounds start counting (the solution's
  /// initial time). Defaults to the first record's time.
  std::optional<double> time_origin;
};

struct VerifyOptions {
  double bound_tolerance = 1e-3;      ///< relative slack on 2.19-type bounds
  double bound_t_min = 0.1;           ///< bounds are checked for t >= this
  double monotone_tolerance = 1e-10;  ///< relative slack on extrema monotonicity
  double identity_tolerance = 1e-4;   ///< volume and length identities
  double dissipation_tolerance = 1e-3;
  double lemma_t_min = 1.0;           ///< V/t and L/sqrt(t) monotone for t >= this
  double length_t_min = 10.0;         ///< L >= factor * c sqrt(t) for t >= this
  double length_factor = 0.9;
  double w_plus_tolerance = 1e-6;
  double mass_tolerance = 1e-6;
};

/// Runs every check applicable to the run. Snapshots are optional; the
/// dissipation identity needs them and is reported not-applicable without.
/// Throws ErrorKind::InvalidArgument if the records are empty or out of order.
VerificationReport verify_bounds(const std::vector<DiagnosticsRecord>& records,
                                 const std::vector<WarpedState>& snapshots,
                                 const TrajectoryContext& ctx, const VerifyOptions& opt);
VerificationReport verify_bounds(const std::vector<DiagnosticsRecord>& records,
                                 const std::vector<BundleState>& snapshots,
                                 const TrajectoryContext& ctx, const VerifyOptions& opt);

// Fits --------------------------------------------------------------------------

enum class FitKind { ExpFlat, SolPower, GrowthExponent, CurvatureDecay };
std::string_view to_string(FitKind k);
FitKind parse_fit_kind(std::string_view s);

struct FitReport {
  FitKind kind = FitKind::ExpFlat;
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t samples = 0;
  /// Kind-specific headline number: decay rate, limit slope L^2/t, growth
  /// exponent, or sup t max|Rm|.
  double value = 0;
  /// Reference for `value` where one exists (sol slope from the holonomy).
  std::optional<double> reference;
  std::optional<bool> pass;  ///< unset when the fit is reported without assertion
  std::string detail;
};

struct FitOptions {
  double min_r2 = 0.99;              ///< exp-flat goodness of fit
  double sol_relative_tolerance = 0.02;
  double decay_t_min = 1.0;          ///< curvature-decay window start
  double decay_slope_band = 0.1;
  /// Two-sided band for Sol-type runs, one-sided (no growth) otherwise.
  bool decay_two_sided = true;
};

/// exp-flat: ln max|Rm| against t over the final half of the run; passes on a
///   negative slope with R^2 >= min_r2.
/// sol-power: |L^2/t - slope_H| and the Sol geodesic residual of the snapshots
///   against ln t; passes when L^2/t at the end lies within the tolerance of
///   the holonomy slope and the residual decays with a negative power.
/// growth-exponent: ln L against ln t over the final half of ln t; reported.
/// curvature-decay: ln(t max|Rm|) against ln t over [decay_t_min, t_end].
FitReport fit_asymptotics(const std::vector<DiagnosticsRecord>& records,
                          const std::vector<BundleState>& snapshots,
                          const TrajectoryContext& ctx, FitKind kind,
                          const FitOptions& opt = {});

}  // namespace symflow
