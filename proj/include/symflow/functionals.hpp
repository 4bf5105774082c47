#pragma once

// Integral diagnostics, entropy functionals and the backward conjugate heat
// solve on stored bundle trajectories.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "symflow/bundle.hpp"
#include "symflow/warped.hpp"

namespace symflow {

/// One row of scalar functionals.
///
/// Warped runs: V is the area of the base, E = int |grad u|^2 dV,
/// min_S = min (R^M - |grad u|^2), L is the shortest coordinate loop (torus)
/// or the meridian length (sphere), detG_* are extrema of e^{2u}.
///
/// Bundle runs: V = int sqrt(det G) sqrt(g_yy) dy, E = int ecal sqrt(g_yy) dy,
/// min_S = min R, max_gradu_sq = max g^yy (d_y ln sqrt(det G))^2, L is the
/// base length and u = ln sqrt(det G). gauss_bonnet is 0.
struct DiagnosticsRecord {
  double t = 0;
  double dt = 0;
  double V = 0;
  double E = 0;
  double min_S = 0;
  double max_gradu_sq = 0;
  double max_riem = 0;  ///< max |Rm|
  double gauss_bonnet = 0;
  double L = 0;
  double detG_min = 0;
  double detG_max = 0;
  double max_energy_density = 0;
  std::optional<double> W_plus;
  double u_min = 0;
  double u_max = 0;
};

inline constexpr std::array<std::string_view, 15> kDiagnosticsColumns = {
    "t",        "dt",       "V",          "E",
    "min_S",    "max_gradu_sq", "max_riem", "gauss_bonnet",
    "L",        "detG_min", "detG_max",   "max_energy_density",
    "W_plus",   "u_min",    "u_max"};

DiagnosticsRecord basic_functionals(const WarpedState& s);
DiagnosticsRecord basic_functionals(const BundleState& s);

/// int (|grad u|^4 + 2 (lap u)^2) dV, which is -dE/dt along the modified flow.
double dissipation(const WarpedState& s);

/// The modified W functional with the (4 pi tau)^-1 e^-f weight. f is shifted
/// by a constant so that the weight has unit mass before evaluation.
double w_functional(const WarpedState& s, const ScalarField& f, double tau);

// Conjugate heat equation ---------------------------------------------------

/// Positive density u~ at `time`; the potential is f~ = -ln u~ - 1/2 ln(4 pi t).
struct ConjugateHeatField {
  double time = 0;
  ScalarField u;
};

/// u~ = 1 / L on the given state.
ConjugateHeatField uniform_terminal(const BundleState& s);

/// int u~ sqrt(g_yy) dy.
double conjugate_heat_mass(const BundleState& s, const ConjugateHeatField& f);

ScalarField conjugate_heat_potential(const ConjugateHeatField& f);

/// Solves du~/dt = -lap u~ - 1/4 ecal u~ backward from `terminal` (placed at
/// the last snapshot) over snapshots of a modified-flow bundle trajectory.
/// The metric between snapshots is interpolated linearly in t. The solve is
/// carried in the density w = u~ sqrt(g_yy), which obeys
/// dw/dt = -d_y(d_y(w / sqrt g) / sqrt g) in conservative form, so mass is
/// preserved to round-off. Returns one field per snapshot, in snapshot order.
/// Throws ErrorKind::Numerical naming the snapshot index if positivity fails.
std::vector<ConjugateHeatField> conjugate_heat_backward(
    const std::vector<BundleState>& snapshots, const ConjugateHeatField& terminal,
    double cfl = 0.25);

/// W_+ = int [t (g^yy f_y^2 - ecal / 4) - f + 1] (4 pi t)^-1/2 e^-f sqrt(g_yy) dy.
double w_plus(const BundleState& s, const ScalarField& f, double t);

/// Distance of a hyperbolic bundle from the Sol profile: the largest P(2,R)
/// distance between G(y) and the geodesic from G(0) to H^T G(0) H at the
/// matching normalized arclength of the base, plus the excess of
/// d(G(0), H^T G(0) H) over the translation length 2c.
double sol_geodesic_residual(const BundleState& s);

}  // namespace symflow
