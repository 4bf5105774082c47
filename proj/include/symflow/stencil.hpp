#pragma once

// Fourth-order centered finite differences on uniform grids.
// Two ghost nodes are needed on each side.

#include <vector>

namespace symflow::stencil {

inline constexpr int kGhost = 2;

inline double d1(double m2, double m1, double p1, double p2, double h) {
  return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}

inline double d2(double m2, double m1, double c, double p1, double p2, double h) {
  return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
}

/// Periodic neighbour tables for an n-point ring.
struct PeriodicIndex {
  std::vector<int> m2, m1, p1, p2;

  explicit PeriodicIndex(int n) : m2(n), m1(n), p1(n), p2(n) {
    for (int i = 0; i < n; ++i) {
      m2[i] = (i - 2 + 2 * n) % n;
      m1[i] = (i - 1 + n) % n;
      p1[i] = (i + 1) % n;
      p2[i] = (i + 2) % n;
    }
  }
};

/// Fourth-order derivative of a periodic 1D sample at node i.
inline double periodic_d1(const std::vector<double>& f, const PeriodicIndex& ix,
                          int i, double h) {
  return d1(f[ix.m2[i]], f[ix.m1[i]], f[ix.p1[i]], f[ix.p2[i]], h);
}

inline double periodic_d2(const std::vector<double>& f, const PeriodicIndex& ix,
                          int i, double h) {
  return d2(f[ix.m2[i]], f[ix.m1[i]], f[i], f[ix.p1[i]], f[ix.p2[i]], h);
}

}  // namespace symflow::stencil
