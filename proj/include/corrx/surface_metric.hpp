#pragma once
// Hyperbolic geometry of the thrice-punctured sphere C \ {0, 1}.  The
// uniformizing coordinate tau(w) (inverse to the modular lambda function)
// comes from complete elliptic integrals computed by the arithmetic-
// geometric mean; the metric density 1 / (Im tau * |lambda'(tau)|) uses
// theta series for lambda'.  Polyline lengths sum hyperbolic distances of
// consecutive uniformized points and subdivide adaptively wherever that
// disagrees with a flat density estimate (coarse sampling or a branch
// jump of tau).  Diagnostic accuracy, about 1e-6.

#include <corrx/common.hpp>
#include <corrx/hyperbolic.hpp>

#include <cmath>
#include <complex>
#include <vector>

namespace corrx {

// Arithmetic-geometric mean with the standard branch rule: each geometric
// mean takes the square root closer to the running arithmetic mean.
inline cplx agm(cplx a, cplx b) {
  for (int it = 0; it < 64; ++it) {
    const cplx am = 0.5 * (a + b);
    cplx gm = std::sqrt(a * b);
    if (std::abs(am - gm) > std::abs(am + gm)) gm = -gm;
    a = am;
    b = gm;
    if (std::abs(a - b) <= 1e-16 * (std::abs(a) + std::abs(b))) break;
  }
  return a;
}

// Complete elliptic integral of the first kind in the parameter
// convention, K(m) with m = k^2.
inline cplx elliptic_K(cplx m) {
  const cplx one(1.0, 0.0);
  return cplx(1.5707963267948966, 0.0) / agm(one, std::sqrt(one - m));
}

// A point of the upper half plane whose modular lambda value is w.
inline cplx tau_from_lambda(cplx w) {
  const cplx one(1.0, 0.0);
  if (std::abs(w) < 1e-300 || std::abs(w - one) < 1e-300)
    throw error("tau_from_lambda: puncture");
  const cplx tau = cplx(0.0, 1.0) * elliptic_K(one - w) / elliptic_K(w);
  if (!(tau.imag() > 0.0))
    throw error("tau_from_lambda: left the upper half plane");
  return tau;
}

namespace detail {

// theta2(tau)^4 and theta3(tau)^4; the fourth powers are single valued.
inline cplx theta2_fourth(cplx tau) {
  const cplx q2 = std::exp(cplx(0.0, 2.0 * 3.141592653589793) * tau);
  cplx sum(0.0, 0.0), term(1.0, 0.0), step = q2;  // term = q^{n(n+1)}
  for (int n = 0; n < 64; ++n) {
    sum += term;
    term *= step;
    step *= q2;
    if (std::abs(term) < 1e-18) break;
  }
  const cplx t2 = 2.0 * std::exp(cplx(0.0, 3.141592653589793 / 4.0) * tau) * sum;
  return (t2 * t2) * (t2 * t2);
}

inline cplx theta3(cplx tau) {
  const cplx q = std::exp(cplx(0.0, 3.141592653589793) * tau);
  const cplx q2 = q * q;
  cplx sum(1.0, 0.0), term = q, step = q2;  // term = q^{n^2}
  for (int n = 1; n < 64; ++n) {
    sum += 2.0 * term;
    term *= step * q;  // q^{(n+1)^2 - n^2} = q^{2n+1}
    step *= q2;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

}  // namespace detail

inline cplx theta3_fourth(cplx tau) {
  const cplx t3 = detail::theta3(tau);
  return (t3 * t3) * (t3 * t3);
}

// lambda(tau) = theta2(tau)^4 / theta3(tau)^4.
inline cplx modular_lambda(cplx tau) {
  return detail::theta2_fourth(tau) / theta3_fourth(tau);
}

// d lambda / d tau = i pi lambda (1 - lambda) theta3(tau)^4.
inline cplx lambda_prime(cplx tau) {
  const cplx l = modular_lambda(tau);
  return cplx(0.0, 3.141592653589793) * l * (cplx(1.0, 0.0) - l) *
         theta3_fourth(tau);
}

// Density of the complete hyperbolic metric of C \ {0, 1} against |dw|.
inline double hyp_density(cplx w) {
  const cplx tau = tau_from_lambda(w);
  return 1.0 / (tau.imag() * std::abs(lambda_prime(tau)));
}

namespace detail {

inline double seg_hyp_length(cplx a, cplx b, cplx ta, cplx tb, int depth) {
  const cplx mid = 0.5 * (a + b);
  const double flat = hyp_density(mid) * std::abs(b - a);
  const double direct = hyp_dist(ta, tb);
  if (depth >= 20) return flat;
  if (std::abs(direct - flat) <= 1e-9 + 1e-5 * flat) return direct;
  const cplx tm = tau_from_lambda(mid);
  return seg_hyp_length(a, mid, ta, tm, depth + 1) +
         seg_hyp_length(mid, b, tm, tb, depth + 1);
}

}  // namespace detail

// Hyperbolic length of a polyline in C \ {0, 1}: consecutive vertices are
// uniformized and their distances summed, subdividing until the flat
// density estimate agrees.  Vertices equal to their predecessor are free.
inline double hyp_length(const std::vector<cplx>& polyline) {
  double total = 0.0;
  if (polyline.size() < 2) return total;
  cplx prev = polyline.front();
  cplx tprev = tau_from_lambda(prev);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const cplx at = polyline[i];
    if (at == prev) continue;
    const cplx tat = tau_from_lambda(at);
    total += detail::seg_hyp_length(prev, at, tprev, tat, 0);
    prev = at;
    tprev = tat;
  }
  return total;
}

}  // namespace corrx
