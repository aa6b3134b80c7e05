#pragma once
// Thick-thin decomposition of geodesic segments against the equivariant
// horoball family of parameter delta, plus winding numbers and roundabout
// lengths of the horoball visits.
//
// The horoball family: at infinity, {Im z > 2/delta}; at a reduced rational
// p/q, the Euclidean disk tangent to R at p/q with diameter delta/(2 q^2),
// i.e. {|qz - p|^2 < (delta/2) Im z}. The family is equivariant under the
// whole modular group, every cusp has width 2 in its own chart, distinct
// horoballs are at distance 2 log(2/delta), and the standard basepoint i is
// at distance log(2/delta) from the family.
//
// Candidate cusps are enumerated adaptively: integer ranges are split and
// pruned by the segment's minimum height (the height along an arc is
// unimodal in x, so interval minima sit at interval ends), and rationals
// between surviving integers come from Stern-Brocot subdivision, pruned the
// same way via the mediant-denominator lower bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <array>
#include <set>
#include <vector>

#include "corrx/common.hpp"
#include "corrx/hyperbolic.hpp"
#include "corrx/matrix2.hpp"

namespace corrx {

struct ThinParams {
  double delta = 0.25;                      // horoball size parameter
  double zeta = 0.99 * 2.0794415416798357;  // 0.99 * log(8) = 0.99 * log(2/delta)
  double mu = 0.0;  // visits with shorter roundabouts are absorbed
};

// Derived sanity bounds for a parameter choice.
struct ThinDiagnostics {
  double basepoint_clearance;  // d(i, horoball family) = log(2/delta)
  double min_horoball_gap;     // 2 log(2/delta)
  double systole;              // 2 acosh(3), shortest closed geodesic
};

inline ThinDiagnostics validate_thin_params(const ThinParams& p) {
  if (!(p.delta > 0.0)) throw error("thin params: delta must be positive");
  ThinDiagnostics d{};
  d.systole = 2.0 * std::acosh(3.0);
  d.basepoint_clearance = std::log(2.0 / p.delta);
  d.min_horoball_gap = 2.0 * d.basepoint_clearance;
  if (p.delta > 0.25 * d.systole)
    throw error("thin params: delta is not small next to the systole");
  if (!(p.zeta > 0.0) || p.zeta > d.basepoint_clearance)
    throw error("thin params: zeta must lie in (0, log(2/delta)]");
  if (p.mu < 0.0) throw error("thin params: mu must be nonnegative");
  return d;
}

// Puncture class of a cusp under the lambda function's boundary values:
// even denominator -> puncture 0, even numerator -> puncture 1, odd/odd ->
// the puncture at infinity (index 2).
inline int cusp_puncture(const BoundaryPt& c) {
  bool p_even = ((c.p % 2) == 0), q_even = ((c.q % 2) == 0);
  if (q_even && !p_even) return 0;
  if (p_even && !q_even) return 1;
  if (!p_even && !q_even) return 2;
  throw error("cusp_puncture: cusp is not in lowest terms");
}

// A unimodular chart carrying infinity to the given cusp (deterministic
// choice of the free column).
inline Mat2 cusp_chart(const BoundaryPt& c) {
  if (c.q == 0) {
    if (c.p != 1) throw error("cusp_chart: infinity must be normalized as 1/0");
    return Mat2{};
  }
  // Extended gcd: find x, y with p x + q y = 1.
  long long old_r = c.p, r = c.q;
  long long old_x = 1, x = 0, old_y = 0, y = 1;
  while (r != 0) {
    long long qt = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - qt * r};
    std::tie(old_x, x) = std::pair{x, old_x - qt * x};
    std::tie(old_y, y) = std::pair{y, old_y - qt * y};
  }
  if (old_r == -1) {
    old_x = -old_x;
    old_y = -old_y;
    old_r = 1;
  }
  if (old_r != 1) throw error("cusp_chart: cusp is not in lowest terms");
  // Deterministic representative of the free column: 0 <= y < |p| when
  // p != 0, else x = 0 (the shift (x, y) -> (x + t q, y - t p) keeps det 1).
  if (c.p != 0) {
    long long ap = c.p < 0 ? -c.p : c.p;
    long long yc = ((old_y % ap) + ap) % ap;
    long long t = (old_y - yc) / c.p;
    old_x += t * c.q;
    old_y = yc;
  } else {
    old_x = 0;  // primitivity forces q = 1 and y = 1
  }
  return Mat2{c.p, -old_y, c.q, old_x};  // det = p*x - (-y)*q = 1
}

inline bool in_horoball(cplx z, const BoundaryPt& c, double delta) {
  if (c.q == 0) return z.imag() > 2.0 / delta;
  double qq = static_cast<double>(c.q), pp = static_cast<double>(c.p);
  return std::norm(qq * z - pp) < 0.5 * delta * z.imag();
}

// Whether z lies inside some horoball of the delta-family; reports which.
inline std::optional<BoundaryPt> covering_horoball(cplx z, double delta) {
  require_upper(z, "covering_horoball");
  if (z.imag() > 2.0 / delta) return BoundaryPt{1, 0};
  auto qmax = static_cast<long long>(std::sqrt(delta / (2.0 * z.imag())) * (1.0 + 1e-12));
  for (long long q = 1; q <= qmax; ++q) {
    double s = std::sqrt(0.5 * delta * z.imag());
    auto plo = static_cast<long long>(std::floor(static_cast<double>(q) * z.real() - s)) - 1;
    auto phi = static_cast<long long>(std::ceil(static_cast<double>(q) * z.real() + s)) + 1;
    for (long long p = plo; p <= phi; ++p) {
      if (std::gcd(p, q) != 1) continue;
      if (in_horoball(z, BoundaryPt{p, q}, delta)) return BoundaryPt{p, q};
    }
  }
  return std::nullopt;
}

// One maximal sub-arc of a geodesic segment inside one horoball.
struct HoroballVisit {
  BoundaryPt cusp;
  double s_in = 0, s_out = 0;    // arclength from the segment start
  cplx z_in, z_out;              // entry and exit points
  double winding_real = 0;       // cusp-chart real displacement / width 2
  long long winding = 0;         // nearest integer
  double roundabout_length = 0;  // 2 asinh(delta |winding_real| / 2)
};

namespace detail {

// Image of the horoball at `cusp` under a real Moebius chart, described as
// either a disk tangent to R at u with diameter D, or (cusp at the chart's
// pole) the half-plane {Im > H}.
struct ChartedBall {
  bool half_plane = false;
  double H = 0;
  double u = 0, D = 0;
};

inline ChartedBall chart_horoball(const RMat& chart, const BoundaryPt& cusp,
                                  double delta, double pole_scale) {
  // A finite boundary point of the horoball (its top, or any boundary point
  // for the cusp at infinity).
  cplx top = cusp.q == 0
                 ? cplx(0.0, 2.0 / delta)
                 : cplx(static_cast<double>(cusp.p) / static_cast<double>(cusp.q),
                        delta / (2.0 * static_cast<double>(cusp.q) *
                                 static_cast<double>(cusp.q)));
  cplx w_top = chart.apply(top);
  double num, den;
  if (cusp.q == 0) {  // the point at infinity: chart(z) -> a/c
    num = chart.a;
    den = chart.c;
  } else {
    double x = static_cast<double>(cusp.p) / static_cast<double>(cusp.q);
    num = chart.a * x + chart.b;
    den = chart.c * x + chart.d;
  }
  ChartedBall out;
  if (std::abs(den) < 1e-13 * pole_scale) {
    out.half_plane = true;
    out.H = w_top.imag();
    return out;
  }
  out.u = num / den;
  out.D = (std::pow(w_top.real() - out.u, 2) + std::pow(w_top.imag(), 2)) /
          w_top.imag();
  return out;
}

// Shared segment geometry for the candidate walk.
struct SegmentFrame {
  Geodesic g;
  RMat chart, inv_chart;
  double sigma0, sigma1, lo, hi;  // chart log-heights of the endpoints
  double x_lo, x_hi;              // x-extent of the segment
  double y_lo_end, y_hi_end;      // endpoint heights at x_lo and x_hi
  double y_end_min;               // min endpoint height
  double f_plus, f_minus;         // feet of the circle (arcs only)
  double delta, pole_scale;

  // Height of the segment over x in [a, b]; +inf when disjoint. Height along
  // an arc is unimodal in x, so the minimum over a subinterval is attained at
  // its ends. The naive R^2 - (x-m)^2 cancels catastrophically near a foot
  // (and can overestimate a tiny height by orders of magnitude, breaking the
  // candidate pruning), so each factor of h^2 = (f+ - x)(x - f-) is anchored
  // at the segment endpoint on its side: an exact nearby-difference plus a
  // positive well-conditioned term.
  double min_height(double a, double b) const {
    a = std::max(a, x_lo);
    b = std::min(b, x_hi);
    if (a > b) return std::numeric_limits<double>::infinity();
    if (g.vertical) return y_end_min;
    auto h2 = [&](double x) {
      double right = (x_hi - x) + y_hi_end * y_hi_end / (x_hi - f_minus);
      double left = (x - x_lo) + y_lo_end * y_lo_end / (f_plus - x_lo);
      return right * left;
    };
    double t = std::min(h2(a), h2(b));
    return std::max(t <= 0.0 ? 0.0 : std::sqrt(t), y_end_min);
  }
};

}  // namespace detail

// All horoball visits of the geodesic segment [z0, z1], ordered along the
// segment. Both endpoints must lie outside every horoball of the family.
inline std::vector<HoroballVisit> horoball_visits(cplx z0, cplx z1,
                                                  double delta,
                                                  double mu = 0.0) {
  require_upper(z0, "horoball_visits");
  require_upper(z1, "horoball_visits");
  std::vector<HoroballVisit> out;
  if (std::abs(z0 - z1) < 1e-15 * std::max(1.0, std::abs(z0))) return out;
  if (covering_horoball(z0, delta))
    throw error("horoball_visits: segment start lies inside a horoball");
  if (covering_horoball(z1, delta))
    throw error("horoball_visits: segment end lies inside a horoball");

  detail::SegmentFrame f;
  f.g = Geodesic::through(z0, z1);
  bool z0_left = z0.real() <= z1.real();
  f.x_lo = z0_left ? z0.real() : z1.real();
  f.x_hi = z0_left ? z1.real() : z0.real();
  f.y_lo_end = z0_left ? z0.imag() : z1.imag();
  f.y_hi_end = z0_left ? z1.imag() : z0.imag();
  f.y_end_min = std::min(z0.imag(), z1.imag());
  if (f.g.vertical) {
    f.chart = f.g.axis_chart();
  } else {
    // Re-anchor each foot at the endpoint on its side: exact on the circle,
    // and immune to the cancellation in m +- R when an endpoint sits low.
    f.f_minus = f.g.m - f.g.R;
    f.f_plus = f.x_hi + f.y_hi_end * f.y_hi_end / (f.x_hi - f.f_minus);
    f.f_minus = f.x_lo - f.y_lo_end * f.y_lo_end / (f.f_plus - f.x_lo);
    f.chart = RMat{1.0, -f.f_plus, 1.0, -f.f_minus};
  }
  f.inv_chart = f.chart.inverse();
  f.sigma0 = std::log(f.chart.apply(z0).imag());
  f.sigma1 = std::log(f.chart.apply(z1).imag());
  f.lo = std::min(f.sigma0, f.sigma1);
  f.hi = std::max(f.sigma0, f.sigma1);
  f.delta = delta;
  f.pole_scale = std::max(
      {1.0, std::abs(f.g.vertical ? f.g.x0 : f.g.m), f.g.vertical ? 0.0 : f.g.R});

  std::set<std::pair<long long, long long>> tested;
  auto test_cusp = [&](long long p, long long q) {
    if (!tested.insert({p, q}).second) return;
    BoundaryPt cusp{p, q};
    detail::ChartedBall ball = detail::chart_horoball(f.chart, cusp, delta, f.pole_scale);
    double sig_a, sig_b;  // chart-height interval of the horoball
    if (ball.half_plane) {
      if (!(ball.H > 0)) return;
      sig_a = std::log(ball.H);
      sig_b = std::numeric_limits<double>::infinity();
    } else {
      double disc = ball.D * ball.D - 4.0 * ball.u * ball.u;
      if (!(disc > 0)) return;
      double h_plus = 0.5 * (ball.D + std::sqrt(disc));
      double h_minus = ball.u == 0.0 ? 0.5 * (ball.D - std::sqrt(disc))
                                     : ball.u * ball.u / h_plus;
      if (!(h_minus > 0) || !(h_plus > h_minus)) return;
      sig_a = std::log(h_minus);
      sig_b = std::log(h_plus);
    }
    // Endpoints are outside every horoball, so any overlap with the segment
    // is full containment; clamp to guard against boundary roundoff.
    if (sig_b <= f.lo || sig_a >= f.hi) return;
    sig_a = std::max(sig_a, f.lo);
    sig_b = std::min(sig_b, f.hi);
    if (!(sig_b > sig_a)) return;

    bool forward = f.sigma1 >= f.sigma0;
    double sigma_in = forward ? sig_a : sig_b;
    double sigma_out = forward ? sig_b : sig_a;
    HoroballVisit v;
    v.cusp = cusp;
    v.s_in = std::abs(sigma_in - f.sigma0);
    v.s_out = std::abs(sigma_out - f.sigma0);
    v.z_in = f.inv_chart.apply(cplx(0.0, std::exp(sigma_in)));
    v.z_out = f.inv_chart.apply(cplx(0.0, std::exp(sigma_out)));
    Mat2 A_inv = cusp_chart(cusp).inverse();
    v.winding_real =
        0.5 * (mobius(A_inv, v.z_out).real() - mobius(A_inv, v.z_in).real());
    v.winding = std::llround(v.winding_real);
    v.roundabout_length = 2.0 * std::asinh(0.5 * delta * std::abs(v.winding_real));
    if (v.roundabout_length < mu) return;  // absorbed into the thick part
    out.push_back(v);
  };

  test_cusp(1, 0);  // the cusp at infinity

  long long guard = 0;
  auto spend = [&guard] {
    if (++guard > 20000000LL)
      throw error("horoball_visits: candidate search exceeded its budget");
  };

  if (f.g.vertical) {
    // Single-x segments: direct scan, at most a few candidates per q.
    auto qmax = static_cast<long long>(
        std::sqrt(delta / (2.0 * f.y_end_min)) * (1.0 + 1e-12));
    for (long long q = 1; q <= qmax; ++q) {
      spend();
      auto base = static_cast<long long>(std::floor(static_cast<double>(q) * f.g.x0));
      for (long long p = base - 1; p <= base + 2; ++p)
        if (std::gcd(p, q) == 1) test_cusp(p, q);
    }
  } else {
    // Stern-Brocot walk between integer frames, pruned by arc height. The
    // descent can be as deep as a continued-fraction partial quotient, so it
    // runs on an explicit stack.
    auto farey = [&](long long P1, long long Q1, long long P2, long long Q2) {
      std::vector<std::array<long long, 4>> stack{{P1, Q1, P2, Q2}};
      while (!stack.empty()) {
        spend();
        auto [p1, q1, p2, q2] = stack.back();
        stack.pop_back();
        long long q = q1 + q2, p = p1 + p2;
        double xl = static_cast<double>(p1) / static_cast<double>(q1);
        double xr = static_cast<double>(p2) / static_cast<double>(q2);
        double qd = static_cast<double>(q);
        double pad = delta / (4.0 * qd * qd);
        // Every cusp strictly inside (xl, xr) has denominator >= q, hence a
        // horoball of height <= delta/(2 q^2) within pad of the interval.
        if (f.min_height(xl - pad, xr + pad) >= delta / (2.0 * qd * qd))
          continue;
        test_cusp(p, q);
        stack.push_back({p1, q1, p, q});
        stack.push_back({p, q, p2, q2});
      }
    };
    auto integer_range = [&](auto&& self, long long a, long long b) -> void {
      spend();
      // Cusps in [a, b] with q = 1 and everything in between: height <= delta/2.
      if (f.min_height(static_cast<double>(a) - 0.25 * delta,
                       static_cast<double>(b) + 0.25 * delta) >= 0.5 * delta)
        return;
      if (a == b) {
        test_cusp(a, 1);
        return;
      }
      if (b == a + 1) {
        test_cusp(a, 1);
        test_cusp(b, 1);
        farey(a, 1, b, 1);
        return;
      }
      long long mid = a + (b - a) / 2;
      self(self, a, mid);
      self(self, mid, b);
    };
    auto n_lo = static_cast<long long>(std::floor(f.x_lo - 0.25 * delta)) - 1;
    auto n_hi = static_cast<long long>(std::ceil(f.x_hi + 0.25 * delta)) + 1;
    integer_range(integer_range, n_lo, n_hi);
  }

  std::sort(out.begin(), out.end(),
            [](const HoroballVisit& a, const HoroballVisit& b) {
              return a.s_in < b.s_in;
            });
  return out;
}

// Thick-thin itinerary of a group element from the standard basepoint.
struct Itinerary {
  double total_length = 0;
  std::vector<HoroballVisit> visits;
};

inline Itinerary itinerary(const Word& w, const ThinParams& par,
                           cplx basepoint = cplx(0.0, 1.0)) {
  validate_thin_params(par);
  Mat2 m = to_matrix(w);
  cplx end = mobius(m, basepoint);
  Itinerary it;
  it.total_length = hyp_dist(basepoint, end);
  if (it.total_length == 0.0) return it;
  it.visits = horoball_visits(basepoint, end, par.delta, par.mu);
  return it;
}

// One alternating piece of the thick-thin decomposition. Lengths are arc
// lengths along the segment, so a decomposition sums to the total length.
struct DecompPiece {
  bool roundabout = false;
  BoundaryPt cusp{1, 0};   // meaningful for roundabouts only
  long long winding = 0;   // idem
  double length = 0;
};

inline std::vector<DecompPiece> decompose(const Word& w, const ThinParams& par,
                                          cplx basepoint = cplx(0.0, 1.0)) {
  Itinerary it = itinerary(w, par, basepoint);
  std::vector<DecompPiece> out;
  double cursor = 0.0;
  for (const HoroballVisit& v : it.visits) {
    if (v.s_in > cursor) out.push_back({false, BoundaryPt{1, 0}, 0, v.s_in - cursor});
    out.push_back({true, v.cusp, v.winding, v.s_out - v.s_in});
    cursor = v.s_out;
  }
  if (it.total_length > cursor)
    out.push_back({false, BoundaryPt{1, 0}, 0, it.total_length - cursor});
  return out;
}

}  // namespace corrx
