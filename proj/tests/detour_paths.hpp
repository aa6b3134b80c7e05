#pragma once

// Test-side construction of near-geodesic detour paths along the vertical
// axis from i to i e^L. Bumps are hyperbolic right-triangle excursions: legs
// t along the axis and h perpendicular to it meet in a hypotenuse of length
// acosh(cosh t cosh h), so a bump adds exactly
//   2 acosh(cosh t cosh h) - 2t
// to the path length, and its apex sits at distance exactly h from the axis.

#include <cmath>
#include <vector>

#include "corrx/hyperbolic.hpp"

namespace detours {

struct Bump {
  double center = 0;     // arc-length position of the bump midpoint
  double halfwidth = 0;  // t: skipped axis on each side
  double height = 0;     // h: perpendicular apex distance
};

inline corrx::cplx on_axis(double s) { return corrx::cplx(0.0, std::exp(s)); }

// Point at signed hyperbolic distance h from i e^s along the perpendicular
// geodesic |z| = e^s (unit-speed parameterization tanh u + i sech u).
inline corrx::cplx off_axis(double s, double h) {
  return std::exp(s) * corrx::cplx(std::tanh(h), 1.0 / std::cosh(h));
}

// Height making one bump of half-width t contribute exactly `extra` length.
inline double bump_height(double t, double extra) {
  return std::acosh(std::cosh(t + 0.5 * extra) / std::cosh(t));
}

// Extra path length contributed by one bump.
inline double bump_extra(double t, double h) {
  return 2.0 * std::acosh(std::cosh(t) * std::cosh(h)) - 2.0 * t;
}

// Piecewise-geodesic path from i to i e^L following the axis except for the
// given (sorted, disjoint) bumps.
inline std::vector<corrx::cplx> detour_path(double L,
                                            const std::vector<Bump>& bumps) {
  std::vector<corrx::cplx> path{on_axis(0.0)};
  double s = 0.0;
  std::size_t bi = 0;
  while (true) {
    double stop = bi < bumps.size() ? bumps[bi].center - bumps[bi].halfwidth : L;
    for (double t = std::floor(s) + 1.0; t < stop; t += 1.0)
      if (t > s) path.push_back(on_axis(t));
    if (bi >= bumps.size()) {
      path.push_back(on_axis(L));
      return path;
    }
    const Bump& b = bumps[bi++];
    double s1 = b.center - b.halfwidth, s2 = b.center + b.halfwidth;
    corrx::cplx m1 = on_axis(s1), m2 = on_axis(s2);
    corrx::cplx apex = off_axis(b.center, b.height);
    path.push_back(m1);
    for (int k = 1; k <= 4; ++k)
      path.push_back(corrx::sample_segment(m1, apex, k / 4.0));
    for (int k = 1; k <= 4; ++k)
      path.push_back(corrx::sample_segment(apex, m2, k / 4.0));
    s = s2;
  }
}

// A single mid-geodesic bump spending the whole slack budget C.
inline std::vector<corrx::cplx> single_bump_path(double L, double C,
                                                 double halfwidth = 5.0) {
  Bump b{0.5 * L, halfwidth, bump_height(halfwidth, C)};
  return detour_path(L, {b});
}

// Many small bumps spending C/k each, spread evenly along the geodesic.
inline std::vector<corrx::cplx> spread_bump_path(double L, double C, int k,
                                                 double halfwidth = 2.0) {
  std::vector<Bump> bumps;
  for (int j = 1; j <= k; ++j) {
    double center = L * j / (k + 1.0);
    bumps.push_back({center, halfwidth, bump_height(halfwidth, C / k)});
  }
  return detour_path(L, bumps);
}

}  // namespace detours
