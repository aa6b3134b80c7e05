#pragma once
// Covering self-correspondences of punctured spheres: a pair of rational
// maps (phi, rho) on the sphere together with the cusp sets that make
// phi : T -> S a finite covering and rho : T -> S analytic but not a
// covering.  Provides the worked catalog, an itemized admissibility
// checker (exact divisibility arguments on the original coordinates),
// coincidence points, short cycles with multipliers, and local branch
// data over the cusps.

#include <corrx/common.hpp>
#include <corrx/gaussian_rational.hpp>
#include <corrx/qpoly.hpp>
#include <corrx/ratmap.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corrx {

// A finite cusp set: numeric points (sorted, infinity last), an exact monic
// squarefree polynomial vanishing on the finite cusps, and an infinity flag.
struct CuspSet {
  std::vector<SpherePt> points;
  QPoly vanishing;
  bool has_infinity = false;

  bool contains(const SpherePt& p, double tol = 1e-7) const {
    for (const SpherePt& q : points)
      if (chordal(p, q) < tol) return true;
    return false;
  }

  bool contains_exact(const GQPt& p) const {
    if (p.inf) return has_infinity;
    return vanishing.eval(p.z).is_zero();
  }
};

struct Correspondence {
  std::string name;
  // Normalized so the target cusps are 0, 1, infinity.
  RationalMap phi, rho;
  CuspSet cusps_S, cusps_T;
  // Exact original-coordinate forms (identical to the above when the
  // normalization is trivial).
  RationalMap phi0, rho0;
  CuspSet cusps_S0, cusps_T0;
  // Target coordinate change taking the original cusps to 0, 1, infinity.
  MobiusC normalization;
  bool normalized_exact = true;
  // Slot of the distinguished fixed point in a derived recursion basis.
  std::optional<std::size_t> fixed_basis_slot;
};

struct CheckItem {
  std::string condition;
  bool pass = false;
  std::string detail;
};

struct AdmissibilityReport {
  std::vector<CheckItem> items;
  bool admissible = false;
};

struct FixedPoint {
  SpherePt t, s;
  bool ideal = false;  // t lies on a source cusp
  double residual = 0.0;
};

struct Cycle {
  std::vector<SpherePt> t_pts, s_pts;  // rho(t_k) = s_k, phi(t_k) = s_{k+1}
  cplx multiplier{0.0, 0.0};           // product of phi'(t_k) / rho'(t_k)
  bool singular = false;               // rho' vanishes along the cycle
  bool contradiction = false;          // interior, well-defined, |mult| <= 1
};

struct CyclesReport {
  std::vector<Cycle> found;
  int starts_tried = 0;
  int starts_converged = 0;
};

namespace detail {

inline QPoly qpi(std::vector<long long> coeffs) {
  std::vector<GaussQ> c;
  c.reserve(coeffs.size());
  for (long long v : coeffs) c.emplace_back(v);
  return QPoly(c);
}

// The vanishing polynomial of C evaluated along m = n/d, homogenized:
// the polynomial whose roots are the finite m-preimages of C.
inline QPoly cusp_fiber_poly(const RationalMap& m, const CuspSet& C) {
  const QPoly& van = C.vanishing;
  const int deg = van.degree();
  QPoly V;
  for (int k = 0; k <= deg; ++k) {
    if (van.coeff(k).is_zero()) continue;
    V = V + van.coeff(k) * (poly_pow(m.num, k) * poly_pow(m.den, deg - k));
  }
  if (C.has_infinity) V = V * m.den;
  return V;
}

inline bool divides(const QPoly& a, const QPoly& b) {
  // Does a divide b?
  if (a.degree() < 1) return !a.is_zero();
  if (b.is_zero()) return true;
  return divmod(b, a).second.is_zero();
}

inline CuspSet cusp_set_from_vanishing(QPoly vanishing, bool has_inf) {
  CuspSet out;
  out.vanishing = vanishing.monic();
  out.has_infinity = has_inf;
  if (out.vanishing.degree() >= 1)
    for (cplx r : poly_roots(mirror(out.vanishing)))
      out.points.push_back(SpherePt::at(r));
  if (has_inf) out.points.push_back(SpherePt::infinity());
  return out;
}

inline Correspondence make_plain(std::string name, QPoly pn, QPoly pd,
                                 QPoly rn, QPoly rd, QPoly cusp_van_T,
                                 bool cusp_inf_T) {
  Correspondence c;
  c.name = std::move(name);
  c.phi0 = RationalMap::from_exact(std::move(pn), std::move(pd));
  c.rho0 = RationalMap::from_exact(std::move(rn), std::move(rd));
  c.phi = c.phi0;
  c.rho = c.rho0;
  c.cusps_S0 = cusp_set_from_vanishing(qpi({0, -1, 1}), true);  // s(s-1), inf
  c.cusps_S = c.cusps_S0;
  c.cusps_T0 = cusp_set_from_vanishing(std::move(cusp_van_T), cusp_inf_T);
  c.cusps_T = c.cusps_T0;
  c.normalization = MobiusC{};
  c.normalized_exact = true;
  return c;
}

inline Correspondence make_rabbit() {
  // phi = (t^2 - 1)/t^2, rho = t; cusps 0, 1, -1, infinity.
  return make_plain("rabbit", qpi({-1, 0, 1}), qpi({0, 0, 1}), qpi({0, 1}),
                    qpi({1}), qpi({0, -1, 0, 1}), true);
}

inline Correspondence make_dendrite() {
  // phi = (t - 2)^2/t^2, rho = t; cusps 0, 1, 2, infinity.
  return make_plain("dendrite", qpi({4, -4, 1}), qpi({0, 0, 1}), qpi({0, 1}),
                    qpi({1}), qpi({0, 2, -3, 1}), true);
}

inline Correspondence make_cubic() {
  // phi = (1 + t)(3t - 1)^3/(16t), rho = (3t - 1)(t + 1)/(4t);
  // cusps 0, +-1, +-1/3, infinity.
  QPoly van = qpi({0, 1}) * qpi({-1, 0, 1}) * qpi({-1, 0, 9});
  return make_plain("cubic", qpi({-1, 8, -18, 0, 27}), qpi({0, 16}),
                    qpi({-1, 2, 3}), qpi({0, 4}), van.monic(), true);
}

inline Correspondence make_quintic() {
  // phi = (t - 3)^2 (5t + 3)^4 (5t^2 + 18t - 3) / (331776 t^3),
  // rho = (-5t^2 + 12t + 9)/(24t).
  QPoly van = qpi({0, 1}) * qpi({-3, 1}) * qpi({3, 1}) * qpi({-3, 5}) *
              qpi({3, 5}) * qpi({-3, 18, 5}) * qpi({-3, -18, 5});
  return make_plain(
      "quintic",
      qpi({-2187, 0, 55404, 165888, 157950, 0, -52500, 0, 3125}),
      qpi({0, 0, 0, 331776}), qpi({9, 12, -5}), qpi({0, 24}), van.monic(),
      true);
}

inline Correspondence make_lodge() {
  // phi = (t^4 + 2t)/(2t^3 + 1), rho = t^2 in original coordinates, where
  // the target cusps are the cube roots of unity and the source cusps the
  // sixth roots.  The normalization to cusps 0, 1, infinity is necessarily
  // floating point (the cusp field is not Gaussian rational).
  Correspondence c;
  c.name = "lodge";
  c.phi0 = RationalMap::from_exact(qpi({0, 2, 0, 0, 1}), qpi({1, 0, 0, 2}));
  c.rho0 = RationalMap::from_exact(qpi({0, 0, 1}), qpi({1}));
  c.cusps_S0 = cusp_set_from_vanishing(qpi({-1, 0, 0, 1}), false);
  c.cusps_T0 = cusp_set_from_vanishing(qpi({-1, 0, 0, 0, 0, 0, 1}), false);
  cplx omega = std::polar(1.0, 2.0 * M_PI / 3.0);
  c.normalization =
      MobiusC::to_zero_one_inf(cplx(1.0, 0.0), omega, std::conj(omega));
  c.phi = compose_mobius(c.normalization, c.phi0);
  c.rho = compose_mobius(c.normalization, c.rho0);
  c.cusps_S = cusp_set_from_vanishing(qpi({0, -1, 1}), true);
  c.cusps_T = c.cusps_T0;  // the source plane is untouched
  c.normalized_exact = false;
  return c;
}

// Partial-pivot solve of a small complex linear system in place; returns
// false when the matrix is numerically singular.
inline bool solve_small(std::vector<std::vector<cplx>>& A,
                        std::vector<cplx>& rhs) {
  const std::size_t k = A.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-14) return false;
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < k; ++r) {
      cplx f = A[r][col] / A[col][col];
      for (std::size_t cc = col; cc < k; ++cc) A[r][cc] -= f * A[col][cc];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t col = k; col-- > 0;) {
    for (std::size_t cc = col + 1; cc < k; ++cc)
      rhs[col] -= A[col][cc] * rhs[cc];
    rhs[col] /= A[col][col];
  }
  return true;
}

}  // namespace detail

inline std::vector<Correspondence> catalog() {
  std::vector<Correspondence> out;
  out.push_back(detail::make_rabbit());
  out.push_back(detail::make_dendrite());
  out.push_back(detail::make_lodge());
  out.push_back(detail::make_cubic());
  out.push_back(detail::make_quintic());
  return out;
}

inline const Correspondence& catalog_entry(std::string_view name) {
  static const std::vector<Correspondence> entries = catalog();
  for (const Correspondence& c : entries)
    if (c.name == name) return c;
  throw error("unknown correspondence: " + std::string(name));
}

// The quadratic z^2 + i as a correspondence pair.  The postcritical orbit
// is i -> -1+i -> -i -> -1+i with infinity fixed; the coordinate change m
// sends -i, -1+i, i to 0, 1, infinity, so the fourth target puncture lands
// at (1+2i)/5.  The first map is m after the quadratic, the second map is
// m alone, and the source plane keeps the original coordinates (where the
// cusps are the full quadratic preimage of the postcritical set).
inline Correspondence make_z2i() {
  const auto g = [](long long re, long long im) {
    return GaussQ(Rat(re), Rat(im));
  };
  Correspondence c;
  c.name = "z2i";
  // m(z^2 + i) = (-z^2 - 2i)/((-1+2i) z^2).
  c.phi = RationalMap::from_exact(QPoly({g(0, -2), g(0, 0), g(-1, 0)}),
                                  QPoly({g(0, 0), g(0, 0), g(-1, 2)}));
  // m(z) = (-z - i)/((-1+2i) z + (2+i)).
  c.rho = RationalMap::from_exact(QPoly({g(0, -1), g(-1, 0)}),
                                  QPoly({g(2, 1), g(-1, 2)}));
  c.phi0 = RationalMap::from_exact(QPoly({g(0, 1), g(0, 0), g(1, 0)}),
                                   QPoly({g(1, 0)}));
  c.rho0 = RationalMap::from_exact(detail::qpi({0, 1}), detail::qpi({1}));

  const GaussQ s4(Rat(1, 5), Rat(2, 5));
  c.cusps_S = detail::cusp_set_from_vanishing(
      detail::qpi({0, 1}) * detail::qpi({-1, 1}) * QPoly({-s4, g(1, 0)}),
      true);
  c.cusps_T = detail::cusp_set_from_vanishing(
      detail::qpi({0, 1}) * detail::qpi({1, 0, 1}) *
          QPoly({g(0, 2), g(0, 0), g(1, 0)}),
      true);
  c.cusps_S0 = detail::cusp_set_from_vanishing(
      detail::qpi({1, 0, 1}) * QPoly({g(1, -1), g(1, 0)}), true);
  c.cusps_T0 = c.cusps_T;
  c.normalization = MobiusC{cplx(-1.0, 0.0), cplx(0.0, -1.0), cplx(-1.0, 2.0),
                            cplx(2.0, 1.0)};
  c.normalized_exact = true;
  return c;
}

// Itemized admissibility check, run on the exact original coordinates.
inline AdmissibilityReport check_admissible(const Correspondence& c) {
  AdmissibilityReport rep;
  auto add = [&rep](std::string cond, bool pass, std::string detail) {
    rep.items.push_back(CheckItem{std::move(cond), pass, std::move(detail)});
  };
  const RationalMap& phi = c.phi0;
  const RationalMap& rho = c.rho0;
  const CuspSet& CS = c.cusps_S0;
  const CuspSet& CT = c.cusps_T0;
  const GQPt inf_pt{GaussQ(), true};

  add("surfaces", true, "source and target are punctured spheres");
  const std::size_t nT = CT.points.size(), nS = CS.points.size();
  add("cusps-finite", nT > 0 && nS > 0,
      std::to_string(nT) + " source cusps, " + std::to_string(nS) +
          " target cusps");
  add("hyperbolic", nT >= 3 && nS >= 3,
      "both complements carry a hyperbolic metric (at least 3 punctures)");

  // phi restricted to the complement is a covering of degree > 1 precisely
  // when the full phi-fiber of the target cusps equals the source cusps and
  // every critical value is a target cusp.
  {
    bool deg_ok = phi.degree() >= 2;
    QPoly V = detail::cusp_fiber_poly(phi, CS);
    bool fiber_eq = squarefree_part(V) == CT.vanishing;
    GQPt v_inf = phi.eval_exact(inf_pt);
    bool inf_ok = CS.contains_exact(v_inf) == CT.has_infinity;
    QPoly W = phi.wronskian();
    bool crit_ok = true;
    if (W.degree() >= 1) crit_ok = detail::divides(squarefree_part(W), V);
    if (phi.local_degree(inf_pt) > 1)
      crit_ok = crit_ok && CS.contains_exact(v_inf);
    add("phi-covering", deg_ok && fiber_eq && inf_ok && crit_ok,
        "degree " + std::to_string(phi.degree()) +
            "; cusp fiber and critical values verified by exact "
            "divisibility");
  }

  // rho maps the source complement into the target complement.
  QPoly Vr = detail::cusp_fiber_poly(rho, CS);
  {
    bool pre_ok = detail::divides(squarefree_part(Vr), CT.vanishing);
    GQPt r_inf = rho.eval_exact(inf_pt);
    if (CS.contains_exact(r_inf)) pre_ok = pre_ok && CT.has_infinity;
    add("rho-analytic", rho.degree() >= 1 && pre_ok,
        "nonconstant; preimages of target cusps are source cusps");
  }

  // rho must fail to be a covering; collect the exact witnesses.
  {
    std::vector<std::string> witnesses;
    QPoly Wr = rho.wronskian();
    bool crit_interior = false;
    if (Wr.degree() >= 1)
      crit_interior = !detail::divides(squarefree_part(Wr), CT.vanishing);
    if (rho.local_degree(inf_pt) > 1 && !CT.has_infinity)
      crit_interior = true;
    if (crit_interior)
      witnesses.push_back(
          "a critical point of the second map lies off the cusps");
    bool extra = !detail::divides(CT.vanishing, Vr);
    GQPt r_inf = rho.eval_exact(inf_pt);
    if (CT.has_infinity && !CS.contains_exact(r_inf)) extra = true;
    if (extra)
      witnesses.push_back(
          "a source cusp maps to an interior point (extra puncture)");
    std::string detail_txt;
    for (const std::string& w : witnesses) {
      if (!detail_txt.empty()) detail_txt += "; ";
      detail_txt += w;
    }
    add("rho-not-covering", !witnesses.empty(),
        witnesses.empty() ? "no witness found" : detail_txt);
  }

  add("degree-comparison", rho.degree() < phi.degree(),
      "second-map degree " + std::to_string(rho.degree()) +
          " < first-map degree " + std::to_string(phi.degree()));

  rep.admissible = true;
  for (const CheckItem& item : rep.items) rep.admissible &= item.pass;
  return rep;
}

// All coincidence points phi(t) = rho(t) in normalized coordinates, tagged
// ideal when t is a source cusp, with the post-refinement residual.
inline std::vector<FixedPoint> fixed_points(const Correspondence& c) {
  std::vector<FixedPoint> out;
  auto emit = [&](const SpherePt& t) {
    SpherePt s1 = c.phi.eval(t), s2 = c.rho.eval(t);
    out.push_back(FixedPoint{t, s1, c.cusps_T.contains(t), chordal(s1, s2)});
  };
  if (c.normalized_exact) {
    QPoly coincidence =
        c.phi.num * c.rho.den - c.rho.num * c.phi.den;
    if (coincidence.is_zero())
      throw error("fixed_points: the two maps coincide");
    if (coincidence.degree() >= 1)
      for (const QPoly& part : squarefree_split(coincidence))
        if (part.degree() >= 1)
          for (cplx r : poly_roots(detail::mirror(part)))
            emit(SpherePt::at(r));
  } else {
    std::vector<cplx> co = detail::combine(
        detail::cmul(c.phi.cnum, c.rho.cden), cplx(-1.0, 0.0),
        detail::cmul(c.rho.cnum, c.phi.cden));
    double scale = 0.0;
    for (const cplx& v : co) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw error("fixed_points: the two maps coincide");
    while (!co.empty() && std::abs(co.back()) <= 1e-12 * scale) co.pop_back();
    if (detail::cdeg(co) >= 1)
      for (const auto& cl : detail::cluster_with_multiplicity(
               co, poly_roots(co), "fixed_points"))
        emit(SpherePt::at(cl.point));
  }
  // Coincidence at infinity.
  SpherePt pi = c.phi.eval(SpherePt::infinity());
  SpherePt ri = c.rho.eval(SpherePt::infinity());
  if (chordal(pi, ri) < 1e-9) {
    out.push_back(FixedPoint{SpherePt::infinity(), pi,
                             c.cusps_T.contains(SpherePt::infinity()),
                             chordal(pi, ri)});
  }
  std::sort(out.begin(), out.end(), [](const FixedPoint& a,
                                       const FixedPoint& b) {
    if (a.t.inf != b.t.inf) return b.t.inf;
    return detail::lex_before(a.t.z, b.t.z);
  });
  return out;
}

namespace detail {

inline cplx eval_qpoly_c(const QPoly& p, cplx z) {
  return chorner(mirror(p), z);
}

// Derivative ratio phi'/rho' at a finite point.
inline cplx multiplier_factor(const Correspondence& c, const SpherePt& t,
                              bool& singular) {
  if (t.inf) {
    // Work in the inverted source chart; the chart factors cancel in the
    // ratio.
    RationalMap pr = RationalMap::from_complex(
        reversed_c(c.phi.cnum, cdeg(c.phi.cnum)),
        reversed_c(c.phi.cden, cdeg(c.phi.cden)));
    RationalMap rr = RationalMap::from_complex(
        reversed_c(c.rho.cnum, cdeg(c.rho.cnum)),
        reversed_c(c.rho.cden, cdeg(c.rho.cden)));
    cplx dn = pr.derivative_at(cplx(0.0, 0.0));
    cplx dd = rr.derivative_at(cplx(0.0, 0.0));
    if (std::abs(dd) < 1e-9) {
      singular = true;
      return cplx(0.0, 0.0);
    }
    return dn / dd;
  }
  cplx dn = c.phi.derivative_at(t.z);
  cplx dd = c.rho.derivative_at(t.z);
  if (std::abs(dd) < 1e-9) {
    singular = true;
    return cplx(0.0, 0.0);
  }
  return dn / dd;
}

// Deduplicate cycles up to rotation of the orbit.
inline bool same_cycle(const Cycle& a, const Cycle& b) {
  if (a.t_pts.size() != b.t_pts.size()) return false;
  const std::size_t n = a.t_pts.size();
  for (std::size_t shift = 0; shift < n; ++shift) {
    bool all = true;
    for (std::size_t k = 0; k < n && all; ++k)
      all = chordal(a.t_pts[k], b.t_pts[(k + shift) % n]) < 1e-7;
    if (all) return true;
  }
  return false;
}

// Canonical rotation: start the orbit at the lexicographically least t.
inline void canonicalize_cycle(Cycle& cyc) {
  const std::size_t n = cyc.t_pts.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (lex_before(cyc.t_pts[k].z, cyc.t_pts[best].z)) best = k;
  std::rotate(cyc.t_pts.begin(), cyc.t_pts.begin() + best, cyc.t_pts.end());
  std::rotate(cyc.s_pts.begin(), cyc.s_pts.begin() + best, cyc.s_pts.end());
}

// Validate, refine, and package a candidate orbit t_1, ..., t_n with
// phi(t_k) = rho(t_{k+1}); returns false when the candidate is ideal,
// has lower period, or fails to converge.
inline bool finish_cycle(const Correspondence& c, std::vector<cplx> t,
                         Cycle& out) {
  const std::size_t n = t.size();
  // Newton refinement of the full branch system.
  for (int iter = 0; iter < 8; ++iter) {
    std::vector<cplx> f(n);
    std::vector<std::vector<cplx>> J(n, std::vector<cplx>(n, cplx(0.0, 0.0)));
    for (std::size_t k = 0; k < n; ++k) {
      cplx pd = chorner(c.phi.cden, t[k]);
      cplx rd = chorner(c.rho.cden, t[(k + 1) % n]);
      if (std::abs(pd) < 1e-12 || std::abs(rd) < 1e-12) return false;
      f[k] = chorner(c.phi.cnum, t[k]) / pd -
             chorner(c.rho.cnum, t[(k + 1) % n]) / rd;
      J[k][k] = c.phi.derivative_at(t[k]);
      J[k][(k + 1) % n] =
          (n == 1 ? J[k][k] - c.rho.derivative_at(t[k])
                  : -c.rho.derivative_at(t[(k + 1) % n]));
      if (n == 1) J[k][k] = J[k][(k + 1) % n];
    }
    if (!solve_small(J, f)) break;
    double step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      t[k] -= f[k];
      step = std::max(step, std::abs(f[k]));
    }
    if (step < 1e-14) break;
  }
  // Residual and structure checks.
  std::vector<SpherePt> tp, sp;
  for (std::size_t k = 0; k < n; ++k) {
    SpherePt tk = SpherePt::at(t[k]);
    if (c.cusps_T.contains(tk)) return false;
    tp.push_back(tk);
    sp.push_back(c.rho.eval(tk));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (chordal(c.phi.eval(tp[k]), sp[(k + 1) % n]) > 1e-8) return false;
    if (c.cusps_S.contains(sp[k])) return false;
  }
  // Exact period n: the s-orbit must not collapse.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (chordal(sp[i], sp[j]) < 1e-7) return false;
  out.t_pts = tp;
  out.s_pts = sp;
  out.singular = false;
  cplx mult(1.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    bool sing = false;
    cplx factor = multiplier_factor(c, tp[k], sing);
    if (sing) {
      out.singular = true;
      break;
    }
    mult *= factor;
  }
  out.multiplier = out.singular ? cplx(0.0, 0.0) : mult;
  out.contradiction = !out.singular && std::abs(out.multiplier) <= 1.0;
  canonicalize_cycle(out);
  return true;
}

}  // namespace detail

// Cycles of length n of the correspondence: orbits t_1, ..., t_n with
// rho(t_k) = s_k and phi(t_k) = s_{k+1}, s-orbit interior and of exact
// period n.  Length 1 and 2 are found exactly (resultant elimination) for
// exact entries; length 3 and inexact entries use seeded multistart Newton.
inline CyclesReport cycles(const Correspondence& c, int n) {
  if (n < 1 || n > 3) throw error("cycles: period must be 1, 2, or 3");
  CyclesReport rep;
  auto push = [&rep](const Cycle& cyc) {
    for (const Cycle& old : rep.found)
      if (detail::same_cycle(old, cyc)) return;
    rep.found.push_back(cyc);
  };

  if (n == 1) {
    for (const FixedPoint& fp : fixed_points(c)) {
      if (fp.ideal) continue;
      Cycle cyc;
      if (fp.t.inf) {
        // Finite s with t at infinity: package directly.
        bool singular = false;
        cplx mult = detail::multiplier_factor(c, fp.t, singular);
        cyc.t_pts = {fp.t};
        cyc.s_pts = {fp.s};
        cyc.singular = singular;
        cyc.multiplier = singular ? cplx(0.0, 0.0) : mult;
        cyc.contradiction =
            !singular && !c.cusps_S.contains(fp.s) &&
            std::abs(cyc.multiplier) <= 1.0;
        push(cyc);
        continue;
      }
      if (detail::finish_cycle(c, {fp.t.z}, cyc)) push(cyc);
    }
  } else if (n == 2 && c.normalized_exact) {
    // Eliminate t2 from phi(t1) = rho(t2), phi(t2) = rho(t1).
    const QPoly &pn = c.phi.num, &pd = c.phi.den;
    const QPoly &rn = c.rho.num, &rd = c.rho.den;
    const int dr = std::max(rn.degree(), rd.degree());
    const int dp = std::max(pn.degree(), pd.degree());
    std::vector<QPoly> P(static_cast<std::size_t>(dr) + 1);
    for (int k = 0; k <= dr; ++k)
      P[static_cast<std::size_t>(k)] = rd.coeff(k) * pn - rn.coeff(k) * pd;
    std::vector<QPoly> Q(static_cast<std::size_t>(dp) + 1);
    for (int k = 0; k <= dp; ++k)
      Q[static_cast<std::size_t>(k)] = pn.coeff(k) * rd - pd.coeff(k) * rn;
    QPoly R = resultant_y(P, Q);
    if (R.is_zero())
      throw error("cycles: branch system has a shared component");
    if (R.degree() >= 1) {
      for (cplx a : poly_roots(detail::mirror(squarefree_part(R)))) {
        // Recover the matching t2 values over this t1 candidate.
        std::vector<cplx> pa, qa;
        for (const QPoly& coeff : P) pa.push_back(detail::eval_qpoly_c(coeff, a));
        for (const QPoly& coeff : Q) qa.push_back(detail::eval_qpoly_c(coeff, a));
        double scale = 0.0;
        for (const cplx& v : pa) scale = std::max(scale, std::abs(v));
        while (!pa.empty() && std::abs(pa.back()) <= 1e-10 * scale)
          pa.pop_back();
        if (detail::cdeg(pa) < 1) continue;
        for (cplx b : poly_roots(pa)) {
          double qres = std::abs(detail::chorner(qa, b)) /
                        detail::eval_scale(qa, b);
          if (qres > 1e-6) continue;
          Cycle cyc;
          if (detail::finish_cycle(c, {a, b}, cyc)) push(cyc);
        }
      }
    }
  } else {
    // Multistart Newton on the cyclic branch system.
    std::mt19937_64 gen(0x5eedc0de0001ULL + static_cast<std::uint64_t>(n));
    const int starts = 400;
    for (int s = 0; s < starts; ++s) {
      ++rep.starts_tried;
      std::vector<cplx> t(static_cast<std::size_t>(n));
      for (auto& z : t)
        z = cplx(static_cast<double>(bounded_draw(gen, 4001)) / 1000.0 - 2.0,
                 static_cast<double>(bounded_draw(gen, 4001)) / 1000.0 - 2.0);
      Cycle cyc;
      if (detail::finish_cycle(c, t, cyc)) {
        ++rep.starts_converged;
        push(cyc);
      }
    }
  }
  std::sort(rep.found.begin(), rep.found.end(),
            [](const Cycle& a, const Cycle& b) {
              return detail::lex_before(a.t_pts[0].z, b.t_pts[0].z);
            });
  return rep;
}

// Local branch data over every source cusp: the local degrees of the two
// maps and the contraction exponent deg(rho)/deg(phi).
struct CuspBranch {
  SpherePt t;
  int deg_phi = 1;
  int deg_rho = 1;
  Rat exponent;
};

inline std::vector<CuspBranch> cusp_branches(const Correspondence& c) {
  std::vector<CuspBranch> out;
  for (const SpherePt& p : c.cusps_T.points) {
    CuspBranch b;
    b.t = p;
    if (p.inf && c.phi.exact && c.rho.exact) {
      b.deg_phi = c.phi.local_degree(GQPt{GaussQ(), true});
      b.deg_rho = c.rho.local_degree(GQPt{GaussQ(), true});
    } else {
      b.deg_phi = c.phi.local_degree_numeric(p);
      b.deg_rho = c.rho.local_degree_numeric(p);
    }
    b.exponent = Rat(b.deg_rho, b.deg_phi);
    out.push_back(b);
  }
  return out;
}

}  // namespace corrx
