#pragma once
// Backward orbits of the multivalued dynamics.  One backward step sends a
// point to the second-map images of its covering fiber, with multiplicity,
// so the depth-n tree carries exactly D^n endpoints.  The full expansion
// switches to seeded random walks, one endpoint each, when the tree
// outgrows the budget; the result records which mode produced it.

#include <corrx/correspondence.hpp>

#include <random>
#include <vector>

namespace corrx {

struct BackwardOrbit {
  std::vector<SpherePt> points;  // endpoints, multiplicity expanded
  int depth = 0;
  bool sampled = false;  // true when the budget forced random sampling
};

// All single-step backward images of s, multiplicity expanded.
inline std::vector<SpherePt> backward_step(const Correspondence& c,
                                           const SpherePt& s) {
  std::vector<SpherePt> out;
  for (const auto& [q, mult] : c.phi.preimages(s)) {
    const SpherePt img = c.rho.eval(q);
    for (int i = 0; i < mult; ++i) out.push_back(img);
  }
  return out;
}

inline BackwardOrbit backward_orbit_sample(
    const Correspondence& c, SpherePt s0, int n, std::uint64_t seed = 0,
    std::size_t budget = std::size_t{1} << 16,
    std::size_t sample_count = 4096) {
  if (n < 0) throw error("backward_orbit_sample: negative depth");
  if (budget == 0 || sample_count == 0)
    throw error("backward_orbit_sample: limits must be positive");
  BackwardOrbit out;
  out.depth = n;

  std::vector<SpherePt> frontier{s0};
  bool full = true;
  for (int level = 0; level < n && full; ++level) {
    std::vector<SpherePt> next;
    for (const SpherePt& s : frontier) {
      const std::vector<SpherePt> step = backward_step(c, s);
      next.insert(next.end(), step.begin(), step.end());
      if (next.size() > budget) {
        full = false;
        break;
      }
    }
    if (full) frontier = std::move(next);
  }
  if (full) {
    out.points = std::move(frontier);
    return out;
  }

  // Sampled mode: independent multiplicity-weighted random walks.
  out.sampled = true;
  std::mt19937_64 rng(seed);
  out.points.reserve(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    SpherePt at = s0;
    for (int level = 0; level < n; ++level) {
      const auto fiber = c.phi.preimages(at);
      std::uint64_t total = 0;
      for (const auto& [q, mult] : fiber)
        total += static_cast<std::uint64_t>(mult);
      std::uint64_t pick = bounded_draw(rng, total);
      SpherePt chosen = fiber.front().first;
      for (const auto& [q, mult] : fiber) {
        if (pick < static_cast<std::uint64_t>(mult)) {
          chosen = q;
          break;
        }
        pick -= static_cast<std::uint64_t>(mult);
      }
      at = c.rho.eval(chosen);
    }
    out.points.push_back(at);
  }
  return out;
}

// Symmetric Hausdorff distance between point clouds, chordal metric.
inline double hausdorff_chordal(const std::vector<SpherePt>& a,
                                const std::vector<SpherePt>& b) {
  if (a.empty() || b.empty()) throw error("hausdorff_chordal: empty cloud");
  double h = 0.0;
  const auto one_side = [&h](const std::vector<SpherePt>& from,
                             const std::vector<SpherePt>& to) {
    for (const SpherePt& p : from) {
      double best = 4.0;
      for (const SpherePt& q : to) best = std::min(best, chordal(p, q));
      h = std::max(h, best);
    }
  };
  one_side(a, b);
  one_side(b, a);
  return h;
}

}  // namespace corrx
