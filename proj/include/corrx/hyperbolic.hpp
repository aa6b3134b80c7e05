#pragma once
// Upper half-plane geometry: distance, geodesics (vertical lines and
// semicircles), closest-point projection onto geodesic segments, displacement
// norms of group elements, and translation lengths.

#include <algorithm>
#include <cmath>
#include <complex>

#include "corrx/common.hpp"
#include "corrx/matrix2.hpp"
#include "corrx/words.hpp"

namespace corrx {

using cplx = std::complex<double>;

inline void require_upper(cplx z, const char* who) {
  if (!(z.imag() > 0.0)) throw error(std::string(who) + ": point not in the upper half-plane");
}

// d(z,w) = 2 asinh( |z-w| / (2 sqrt(Im z) sqrt(Im w)) ); robust for points
// with tiny imaginary parts, where the cosh form loses digits, and the split
// square roots keep the product from overflowing for very high points.
inline double hyp_dist(cplx z, cplx w) {
  require_upper(z, "hyp_dist");
  require_upper(w, "hyp_dist");
  return 2.0 * std::asinh(std::abs(z - w) /
                          (2.0 * std::sqrt(z.imag()) * std::sqrt(w.imag())));
}

// Real Moebius map (not necessarily integral), acting on H.
struct RMat {
  double a = 1, b = 0, c = 0, d = 1;
  cplx apply(cplx z) const { return (a * z + b) / (c * z + d); }
  RMat inverse() const {
    double dt = a * d - b * c;
    return RMat{d / dt, -b / dt, -c / dt, a / dt};
  }
};

// An unoriented complete geodesic: a vertical line Re z = x0 or a semicircle
// centered at m with radius R.
struct Geodesic {
  bool vertical = false;
  double x0 = 0;         // vertical case
  double m = 0, R = 1;   // semicircle case

  static Geodesic through(cplx z, cplx w) {
    require_upper(z, "Geodesic::through");
    require_upper(w, "Geodesic::through");
    // For very high points the squared norms below overflow; z -> z/lambda
    // is an isometry scaling m and R linearly, and a power-of-two lambda
    // keeps every intermediate exactly a shifted copy of the moderate case.
    double mag = std::max({std::abs(z.real()), z.imag(),
                           std::abs(w.real()), w.imag()});
    if (mag > 1e150) {
      int e = 0;
      std::frexp(mag, &e);
      double lam = std::ldexp(1.0, e);
      Geodesic g = through(z / lam, w / lam);
      if (g.vertical)
        g.x0 *= lam;
      else {
        g.m *= lam;
        g.R *= lam;
      }
      return g;
    }
    double dx = w.real() - z.real();
    // Exact vertical only when the real parts coincide to working precision;
    // the callers that need exactness construct vertical lines directly.
    double scale = std::max({std::abs(z.real()), std::abs(w.real()), 1.0});
    if (std::abs(dx) < 1e-14 * scale) {
      Geodesic g;
      g.vertical = true;
      g.x0 = 0.5 * (z.real() + w.real());
      return g;
    }
    Geodesic g;
    g.m = (std::norm(w) - std::norm(z)) / (2.0 * dx);
    g.R = std::abs(z - g.m);
    return g;
  }

  // Chart sending this geodesic onto the imaginary axis (for a semicircle,
  // endpoint m+R -> 0 and m-R -> infinity; verticals translate to Re = 0).
  RMat axis_chart() const {
    if (vertical) return RMat{1, -x0, 0, 1};
    return RMat{1, -(m + R), 1, -(m - R)};
  }
};

// Distance from a point to a complete geodesic: in the axis chart,
// sinh d = |Re| / Im.
inline double dist_to_geodesic(cplx z, const Geodesic& g) {
  cplx u = g.axis_chart().apply(z);
  return std::asinh(std::abs(u.real()) / u.imag());
}

// Distance from a point to the geodesic segment [s1, s2].
inline double dist_to_segment(cplx z, cplx s1, cplx s2) {
  double endpoint_gap = std::abs(s1 - s2) /
                        (2.0 * std::sqrt(s1.imag()) * std::sqrt(s2.imag()));
  if (endpoint_gap < 1e-15) return hyp_dist(z, s1);  // degenerate segment
  Geodesic g = Geodesic::through(s1, s2);
  RMat chart = g.axis_chart();
  cplx u = chart.apply(z);
  double lo = std::abs(chart.apply(s1));
  double hi = std::abs(chart.apply(s2));
  if (lo > hi) std::swap(lo, hi);
  double foot = std::clamp(std::abs(u), lo, hi);
  return hyp_dist(u, cplx(0.0, foot));
}

// Point at fraction t in [0,1] of the way from s1 to s2 along the geodesic,
// measured by arclength.
inline cplx sample_segment(cplx s1, cplx s2, double t) {
  Geodesic g = Geodesic::through(s1, s2);
  RMat chart = g.axis_chart();
  double h1 = chart.apply(s1).imag();
  double h2 = chart.apply(s2).imag();
  double h = h1 * std::pow(h2 / h1, t);
  return chart.inverse().apply(cplx(0.0, h));
}

// Displacement of the group element w at the basepoint (default i).  At
// the basepoint i the displacement has the exact integer form
//   cosh d = (a^2 + b^2 + c^2 + d^2) / 2,   i.e.  d = 2 asinh(sqrt(S-2)/2),
// where S - 2 = (a-d)^2 + (b+c)^2 >= 0.  S is the same integer for a
// matrix and its inverse, so the norm is symmetric to the bit; the asinh
// form keeps full precision near the identity.
inline double norm_at(const Word& w, cplx basepoint = cplx(0.0, 1.0)) {
  Mat2 m = to_matrix(w);
  if (basepoint == cplx(0.0, 1.0)) {
    const __int128 s2 = static_cast<__int128>(m.a - m.d) * (m.a - m.d) +
                        static_cast<__int128>(m.b + m.c) * (m.b + m.c);
    return 2.0 * std::asinh(0.5 * std::sqrt(static_cast<double>(s2)));
  }
  return hyp_dist(basepoint, mobius(m, basepoint));
}

// Translation length along the axis: 2 acosh(|tr|/2) for hyperbolic
// elements, 0 for parabolic/elliptic/identity.
inline double translation_length(const Mat2& m) {
  if (classify(m) != IsometryType::hyperbolic) return 0.0;
  double half_tr = std::abs(static_cast<double>(m.trace())) / 2.0;
  return 2.0 * std::acosh(half_tr);
}

}  // namespace corrx
