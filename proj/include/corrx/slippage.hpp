#pragma once

// Quasigeodesic slippage diagnostics: how far a near-geodesic path can stray
// from the geodesic between its endpoints, and how much of the geodesic sits
// far from the path. A path of length at most L + C between the endpoints of
// a geodesic of length L stays within log 4 + C/2 + C of it; the proportion
// of the geodesic at distance >= c0 from the path decays geometrically in c0.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "corrx/hyperbolic.hpp"

namespace corrx {

struct SlippageReport {
  bool preconditions_ok = true;
  std::string precondition_note;

  double declared_length = 0;    // L
  double slack = 0;              // C
  double endpoint_distance = 0;  // geodesic distance between path endpoints
  double path_length = 0;        // measured polyline length

  double max_deviation = 0;  // max over path vertices of distance to geodesic
  double bound = 0;          // log 4 + C/2 + C
  bool within_bound = false;

  std::vector<double> c0_grid;      // deviation thresholds
  std::vector<double> proportion;   // fraction of geodesic at distance >= c0
  double fitted_decay_base = 0;     // a in p(c0) ~ (C/L) a^(-c0); 0 if not fit
};

namespace detail {

// Distance from a point to a piecewise-geodesic path.
inline double dist_to_path(cplx z, const std::vector<cplx>& path) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    best = std::min(best, dist_to_segment(z, path[k], path[k + 1]));
  return best;
}

}  // namespace detail

inline SlippageReport slippage_check(double L, double C,
                                     const std::vector<cplx>& path,
                                     int geodesic_samples = 1024) {
  if (path.size() < 2) throw error("slippage_check: path needs two points");
  for (const cplx& z : path) require_upper(z, "slippage_check");

  SlippageReport r;
  r.declared_length = L;
  r.slack = C;
  r.endpoint_distance = hyp_dist(path.front(), path.back());
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    r.path_length += hyp_dist(path[k], path[k + 1]);
  r.bound = std::log(4.0) + 0.5 * C + C;

  // Preconditions are reported, never enforced.
  if (!(L > 100.0 + 100.0 * C)) {
    r.preconditions_ok = false;
    r.precondition_note = "geodesic too short for the slack (need L > 100 + 100 C)";
  } else if (std::abs(r.endpoint_distance - L) > 1e-6 * std::max(1.0, L)) {
    r.preconditions_ok = false;
    r.precondition_note = "declared length does not match the endpoint distance";
  } else if (r.path_length > L + C + 1e-6 * std::max(1.0, L)) {
    r.preconditions_ok = false;
    r.precondition_note = "path exceeds its length budget L + C";
  }

  for (const cplx& z : path)
    r.max_deviation =
        std::max(r.max_deviation, dist_to_segment(z, path.front(), path.back()));
  r.within_bound = r.max_deviation <= r.bound;

  // Proportion of the geodesic at distance >= c0 from the path, on a fixed
  // threshold grid; the curve is a tail distribution, nonincreasing in c0.
  std::vector<double> dist(static_cast<std::size_t>(geodesic_samples));
  for (int k = 0; k < geodesic_samples; ++k) {
    double t = (k + 0.5) / geodesic_samples;
    cplx z = sample_segment(path.front(), path.back(), t);
    dist[static_cast<std::size_t>(k)] = detail::dist_to_path(z, path);
  }
  for (int i = 0; i <= 12; ++i) r.c0_grid.push_back(0.25 * i);
  for (double c0 : r.c0_grid) {
    auto far_count = std::count_if(dist.begin(), dist.end(),
                                   [&](double d) { return d >= c0; });
    r.proportion.push_back(static_cast<double>(far_count) /
                           static_cast<double>(geodesic_samples));
  }

  // Least-squares fit of log p(c0) = const - c0 log a over the positive,
  // nontrivial part of the curve; diagnostic only.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < r.c0_grid.size(); ++k) {
    if (r.c0_grid[k] <= 0.0 || r.proportion[k] <= 0.0 ||
        r.proportion[k] >= 1.0)
      continue;
    double x = r.c0_grid[k], y = std::log(r.proportion[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    double denom = n * sxx - sx * sx;
    if (denom > 0) {
      double slope = (n * sxy - sx * sy) / denom;
      r.fitted_decay_base = std::exp(-slope);
    }
  }
  return r;
}

}  // namespace corrx
