#pragma once

// Warped-product metrics h = g + e^{2u} dtheta^2 over a closed surface M.
//
// Two base discretizations are supported:
//
//  * Torus: g = g11 dx^2 + 2 g12 dx dy + g22 dy^2 on an n x n periodic grid
//    over [0,1)^2, node (i, j) at (i/n, j/n), stored row-major as i + n*j.
//
//  * Rotationally symmetric sphere: g = a(x) dx^2 + f(x)^2 dphi^2 with
//    x in [0, pi] on a staggered grid x_i = (i + 1/2) pi / n. Poles are not
//    nodes; ghost nodes reflect f oddly and a, u evenly across each pole.
//    The round sphere of radius r is a = r^2, f = r sin x.
//
// Rotationally symmetric reduction of the 2D flow (u = u(x)):
//
//   K          = -(f'' - f' a' / (2a)) / (a f)           R^M = 2K
//   |grad u|^2 = u'^2 / a
//   Hess_xx    = u'' - a' u' / (2a),   Hess_pp = f f' u' / a
//   lap u      = Hess_xx / a + f' u' / (a f)
//
//   modified:    a_t = -R a + 2 u'^2,                f_t = -K f,
//                u_t = lap u
//   unmodified:  a_t = -R a + 2 Hess_xx + 2 u'^2,   f_t = -K f + f' u' / a,
//                u_t = lap u + u'^2 / a
//
// Both preserve the pole condition f'(pole)/sqrt(a(pole)) = 1.
//
// All spatial derivatives use fourth-order centered stencils.

#include <string>
#include <variant>
#include <vector>

namespace symflow {

using ScalarField = std::vector<double>;

enum class FlowMode { Unmodified, Modified };
enum class Topology { Torus, SphereRotsym };

struct TorusMetric {
  int n = 0;
  ScalarField g11, g12, g22;
};

struct SphereProfile {
  int n = 0;
  ScalarField a, f;  ///< g_xx and the rotation radius
};

using SurfaceMetric = std::variant<TorusMetric, SphereProfile>;

Topology topology_of(const SurfaceMetric& m);
int grid_size(const SurfaceMetric& m);
/// Number of nodes carrying a scalar field (n*n or n).
std::size_t node_count(const SurfaceMetric& m);
int euler_characteristic(Topology t);
std::string_view to_string(Topology t);
std::string_view to_string(FlowMode m);

/// Relative tolerance on |f'(pole)/sqrt(a(pole)) - 1|.
inline constexpr double kPoleTolerance = 1e-3;

struct WarpedState {
  SurfaceMetric metric;
  ScalarField u;
  double time = 0;
};

/// Throws ErrorKind::InvalidState naming the first offending node.
void validate(const WarpedState& s);
void validate_metric(const SurfaceMetric& m);

struct WarpedCurvature {
  ScalarField r_m;           ///< scalar curvature of the base
  ScalarField r_n;           ///< scalar curvature of the warped product
  ScalarField riem_norm_sq;  ///< |Rm^N|^2
  /// Ricci of N: base components (torus: xx, xy, yy; sphere: xx, 0, phiphi)
  /// and the fiber component Ric_thetatheta.
  ScalarField ric11, ric12, ric22, ric_thth;
  ScalarField grad_u_sq;
  ScalarField lap_u;
  ScalarField hess_norm_sq;  ///< |Hess u|^2
};

WarpedCurvature curvature_warped(const WarpedState& s);

/// Gauss curvature of the base alone.
ScalarField gauss_curvature(const SurfaceMetric& m);

/// |grad f|^2_g for a nodal field f (sphere: f even across the poles).
ScalarField gradient_norm_sq(const SurfaceMetric& m, const ScalarField& f);

struct WarpedRate {
  SurfaceMetric dg;
  ScalarField du;
};

WarpedRate rhs_warped(const WarpedState& s, FlowMode mode);

/// Integral of a nodal field against dV_g (spectral on the torus, fourth
/// order with pole correction on the sphere). The sphere integral includes
/// the 2 pi from the rotation angle.
double integrate(const SurfaceMetric& m, const ScalarField& field);
double area(const SurfaceMetric& m);

/// Integral of R^M dV; equals 4 pi chi(M) up to discretization error.
double gauss_bonnet(const SurfaceMetric& m);

/// Smallest physical grid spacing squared (used for the step size).
double min_spacing_sq(const SurfaceMetric& m);

/// One explicit RK4 step of size dt.
WarpedState advance_rk4(const WarpedState& s, double dt, FlowMode mode);

/// s + dt * rate (fields only; time untouched).
void axpy(WarpedState& s, double dt, const WarpedRate& r);

struct GaugeProbeReport {
  double volume_diff = 0;
  double max_riem_diff = 0;
  double total_curvature_diff = 0;
};

/// Advances one step in each mode and compares diffeomorphism-invariant
/// scalars: volume, max |Rm^N| and the integral of R^M.
GaugeProbeReport lie_gauge_equivalence_probe(const WarpedState& s, double dt);

// Initial data ----------------------------------------------------------

/// Flat torus of side length `side` (g = side^2 I) with
/// u = u0 + amplitude * cos(2 pi x).
WarpedState make_flat_torus(int n, double side, double amplitude, double u0 = 0);

/// Round sphere of radius r with u = u0 + amplitude * cos(x).
WarpedState make_round_sphere(int n, double r, double amplitude = 0, double u0 = 0);

/// Torus with conformal metric e^{2 phi} I, phi = amp * sin(2 pi x) cos(2 pi y),
/// and u = 0.
WarpedState make_bumpy_torus(int n, double amp);

/// Largest pole-regularity defect |f'/sqrt(a) - 1| over both poles.
double pole_defect(const SphereProfile& p);

}  // namespace symflow
