#pragma once
// Polyline paths and numerical lifting through a rational covering map:
// predictor-corrector continuation of phi(z(t)) = gamma(t) along a piecewise
// linear target, with adaptive step halving and branch-collision detection.
//
// The lift is sampled at exactly the input parameters, so the output
// polyline aligns index-by-index with the input.  Tracking is accepted only
// while the corrected point stays well separated from every other preimage
// of the current target: the attempted step is halved until the corrector's
// total displacement is at most a third of that separation and the motion of
// the tracked point at most half of the previous one.  When halving bottoms
// out — two preimages collide near a critical value — the lift reports a
// branch ambiguity instead of guessing.

#include <corrx/common.hpp>
#include <corrx/ratmap.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace corrx {

struct PathPolyline {
  std::vector<cplx> samples;
  bool closed = false;
  cplx basepoint{0.0, 0.0};
};

namespace detail {

// Value and derivative of the complex-coefficient rational function.
struct RatEval {
  std::vector<cplx> n, d, dn, dd;
  explicit RatEval(const RationalMap& m)
      : n(m.cnum), d(m.cden), dn(cderiv(m.cnum)), dd(cderiv(m.cden)) {}
  cplx value(cplx z) const { return chorner(n, z) / chorner(d, z); }
  cplx deriv(cplx z) const {
    const cplx dv = chorner(d, z);
    return (chorner(dn, z) * dv - chorner(n, z) * chorner(dd, z)) / (dv * dv);
  }
};

// Finite preimages of w as a raw root list (multiple roots appear as
// clusters of nearly equal entries; no multiplicity grouping).
inline std::vector<cplx> lift_fiber(const RationalMap& phi, cplx w) {
  const std::size_t n = std::max(phi.cnum.size(), phi.cden.size());
  std::vector<cplx> fiber(n, cplx(0.0, 0.0));
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx nk = k < phi.cnum.size() ? phi.cnum[k] : cplx(0.0, 0.0);
    const cplx dk = k < phi.cden.size() ? phi.cden[k] : cplx(0.0, 0.0);
    fiber[k] = nk - w * dk;
    scale = std::max(scale, std::abs(fiber[k]));
  }
  if (scale == 0.0) throw error("lift_path: fiber polynomial vanished");
  while (fiber.size() > 1 && std::abs(fiber.back()) <= 1e-12 * scale)
    fiber.pop_back();
  if (fiber.size() <= 1) return {};
  return poly_roots(fiber);
}

}  // namespace detail

// Lifts gamma through phi starting from the preimage z0 of gamma's first
// sample.  Errors: basepoint not over the start; branch ambiguity when two
// preimages approach within the separation threshold; corrector failure or
// residual above `tol`.
inline PathPolyline lift_path(const RationalMap& phi, const PathPolyline& gamma,
                              cplx z0, double tol = 1e-9) {
  const std::vector<cplx>& in = gamma.samples;
  if (in.empty()) throw error("lift_path: empty path");
  if (phi.degree() < 1)
    throw error("lift_path: cannot lift through a constant map");
  const detail::RatEval f(phi);

  // Polish the start onto the fiber, then verify it lies over gamma(0).
  cplx z = z0;
  for (int it = 0; it < 3; ++it) {
    const cplx fp = f.deriv(z);
    if (!(std::abs(fp) > 1e-280)) break;
    z -= (f.value(z) - in.front()) / fp;
  }
  if (!(std::abs(f.value(z) - in.front()) <=
        1e-8 * std::max(1.0, std::abs(in.front()))) ||
      !(std::abs(z - z0) <= 1e-6 * std::max(1.0, std::abs(z0))))
    throw error("lift_path: basepoint does not lie over the path start");

  // Distance from `at` to the nearest preimage of w other than its own.
  const auto separation = [&](cplx w, cplx at) -> double {
    double d0 = 1e300, d1 = 1e300;
    for (cplx r : detail::lift_fiber(phi, w)) {
      const double d = std::abs(r - at);
      if (d < d0) {
        d1 = d0;
        d0 = d;
      } else {
        d1 = std::min(d1, d);
      }
    }
    return d1;
  };

  PathPolyline out;
  out.samples.reserve(in.size());
  out.samples.push_back(z);
  out.basepoint = z;

  const std::size_t nseg = in.size() - 1;
  double sep_prev = separation(in.front(), z);
  if (sep_prev < 1e-10 * std::max(1.0, std::abs(z)))
    throw error(
        "lift_path: branch ambiguity at the start (preimages within the "
        "separation threshold)");

  // Initial step: 2^-8 of the global parameter, in per-segment units.
  const double h0 = std::min(1.0, static_cast<double>(nseg) / 256.0);
  for (std::size_t s = 0; s < nseg; ++s) {
    const cplx w0 = in[s], w1 = in[s + 1];
    double u = 0.0;
    while (u < 1.0) {
      double h = std::min(h0, 1.0 - u);
      const char* why = "corrector failed";
      for (;;) {
        const double u_try = h >= 1.0 - u - 1e-15 ? 1.0 : u + h;
        const cplx w_t = w0 + u_try * (w1 - w0);
        cplx zc = z;
        const cplx fp0 = f.deriv(zc);
        if (std::abs(fp0) > 1e-280)
          zc += (u_try - u) * (w1 - w0) / fp0;  // Euler predictor
        bool converged = false;
        double radius = 0.0;  // total corrector displacement
        for (int it = 0; it < 12; ++it) {
          const cplx fv = f.value(zc) - w_t;
          if (!std::isfinite(std::abs(fv))) break;
          if (std::abs(fv) <= 1e-12 * std::max(1.0, std::abs(w_t))) {
            converged = true;
            break;
          }
          const cplx fp = f.deriv(zc);
          if (!(std::abs(fp) > 1e-280)) break;
          const cplx dz = fv / fp;
          zc -= dz;
          radius += std::abs(dz);
        }
        bool accepted = false;
        if (converged) {
          const double sep = separation(w_t, zc);
          if (sep < 1e-10 * std::max(1.0, std::abs(zc))) {
            why = "two preimages within the separation threshold";
          } else if (3.0 * radius <= sep &&
                     2.0 * std::abs(zc - z) <= sep_prev) {
            z = zc;
            sep_prev = sep;
            u = u_try;
            accepted = true;
          } else {
            why = "two preimages within the separation threshold";
          }
        }
        if (accepted) break;
        h *= 0.5;
        if (h < 0x1p-32) {
          const double t_global =
              (static_cast<double>(s) + u) / static_cast<double>(nseg);
          throw error("lift_path: " + std::string(why) +
                      " near parameter t = " + std::to_string(t_global));
        }
      }
    }
    out.samples.push_back(z);
  }

  double resid = 0.0;
  for (std::size_t k = 0; k < in.size(); ++k)
    resid = std::max(resid, std::abs(f.value(out.samples[k]) - in[k]));
  if (!(resid <= tol))
    throw error("lift_path: residual " + std::to_string(resid) +
                " above tolerance");

  out.closed = false;
  if (gamma.closed && out.samples.size() >= 2 &&
      std::abs(out.samples.back() - out.samples.front()) <=
          1e-7 * std::max(1.0, std::abs(out.samples.front()))) {
    out.samples.back() = out.samples.front();
    out.closed = true;
  }
  return out;
}

}  // namespace corrx
