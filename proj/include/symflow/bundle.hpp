#pragma once

// Locally T^2-invariant metrics on torus bundles over the circle:
//
//   h = G_ij(y) dx^i dx^j + g_yy(y) dy^2,   y in [0, 1),
//
// sampled at y_k = k / n. The fiber metric obeys G(y + 1) = H^T G(y) H for the
// gluing matrix H, while g_yy is periodic. Derivatives are fourth-order
// centered differences taken through ghost nodes built from that rule.

#include <optional>
#include <vector>

#include "symflow/holonomy.hpp"
#include "symflow/linalg2.hpp"
#include "symflow/warped.hpp"  // ScalarField, FlowMode

namespace symflow {

struct BundleState {
  int n = 0;
  ScalarField gyy;
  std::vector<Sym2> G;
  /// Real gluing matrix used by the ghost extension. Equals holonomy->matrix()
  /// whenever `holonomy` is set; synthetic Sol slices use a non-integer one.
  Mat2 gluing = Mat2::identity();
  std::optional<Holonomy> holonomy;
  double time = 0;
};

/// Throws ErrorKind::InvalidState with the node index of the first violation.
void validate(const BundleState& s);

/// Fields on nodes -width .. n + width - 1; element k + width holds node k.
struct ExtendedBundle {
  int width = 0;
  ScalarField gyy;
  std::vector<Sym2> G;

  const Sym2& g_at(int k) const { return G[std::size_t(k + width)]; }
  double gyy_at(int k) const { return gyy[std::size_t(k + width)]; }
};

/// Ghost nodes past y = 1 carry (H^q)^T G H^q for the q-th period, with
/// negative q using the inverse; g_yy is extended periodically.
ExtendedBundle extend_with_holonomy(const BundleState& s, int width);

struct BundleCurvature {
  ScalarField r1212;            ///< R_{1212}
  std::vector<Sym2> r_iyjy;      ///< R_{iyjy}
  std::vector<Sym2> ric_fiber;   ///< Ric_{ij}
  ScalarField ric_yy;
  ScalarField scalar;            ///< R
  ScalarField riem_norm_sq;      ///< |Rm|^2
};

BundleCurvature curvature_bundle(const BundleState& s);

struct BundleRate {
  ScalarField dgyy;
  std::vector<Sym2> dG;
};

BundleRate rhs_bundle(const BundleState& s, FlowMode mode);

/// g^yy Tr((G^-1 G_y)^2), pointwise nonnegative.
ScalarField energy_density(const BundleState& s);

/// sqrt(det G) per node.
ScalarField fiber_volume(const BundleState& s);

/// Integral of sqrt(g_yy) over the circle.
double base_length(const BundleState& s);

/// Integral of a nodal field against sqrt(g_yy) dy.
double integrate(const BundleState& s, const ScalarField& field);

double min_spacing_sq(const BundleState& s);

void axpy(BundleState& s, double dt, const BundleRate& r);
BundleState advance_rk4(const BundleState& s, double dt, FlowMode mode);

struct BundleGaugeProbe {
  double length_diff = 0;
  double max_riem_diff = 0;
  double det_min_diff = 0;
  double det_max_diff = 0;
};
BundleGaugeProbe lie_gauge_equivalence_probe(const BundleState& s, double dt);

// Initial data ----------------------------------------------------------

/// The Sol solution g_yy = 4 c^2 (t + a), G = diag(e^{2cy}, e^{-2cy}) at time
/// t, glued by the real matrix diag(e^c, e^-c).
BundleState make_sol_slice(int n, double c, double a, double t);

/// G(y) = P(y)^T S(y) P(y) with P(y) = exp(y log(+-H)) and
/// S(y) = exp(eps * (cos(2 pi y) sigma_z + 1/2 sin(2 pi y) sigma_x)
///            + delta * cos(2 pi y) I),
/// g_yy(y) = gyy0 * (1 + eps_g * cos(2 pi y)).
/// With all amplitudes zero and symmetric hyperbolic H this is the Sol profile
/// e^{yX}.
struct BundleInit {
  double gyy0 = 1.0;
  double eps = 0.0;
  double delta = 0.0;
  double eps_g = 0.0;
  double t0 = 0.0;
};
BundleState make_bundle(int n, const Holonomy& h, const BundleInit& init);

}  // namespace symflow
