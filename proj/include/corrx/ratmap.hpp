#pragma once
// Rational self-maps of the Riemann sphere.  A map carries an exact
// Gaussian-rational numerator/denominator pair in lowest terms whenever one
// is available, together with complex-double mirrors that every numeric
// routine works from.  On top of evaluation this file provides polynomial
// root finding, preimage fibers with multiplicity (with an explicit
// ill-conditioning guard), critical points, local degrees in exact and
// numeric flavors, and Moebius changes of coordinates.

#include <corrx/common.hpp>
#include <corrx/gaussian_rational.hpp>
#include <corrx/qpoly.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace corrx {

using cplx = std::complex<double>;

// A point on the Riemann sphere: a finite complex number or infinity.
struct SpherePt {
  cplx z{0.0, 0.0};
  bool inf = false;

  static SpherePt at(cplx value) { return SpherePt{value, false}; }
  static SpherePt infinity() { return SpherePt{cplx(0.0, 0.0), true}; }
};

// Exact sphere point with a Gaussian-rational finite part.
struct GQPt {
  GaussQ z{};
  bool inf = false;
};

// Chordal metric on the sphere; values lie in [0, 2].
inline double chordal(const SpherePt& a, const SpherePt& b) {
  if (a.inf && b.inf) return 0.0;
  if (a.inf) return 2.0 / std::sqrt(1.0 + std::norm(b.z));
  if (b.inf) return 2.0 / std::sqrt(1.0 + std::norm(a.z));
  return 2.0 * std::abs(a.z - b.z) /
         std::sqrt((1.0 + std::norm(a.z)) * (1.0 + std::norm(b.z)));
}

namespace detail {

// Degree of a complex coefficient vector after trimming exact zeros.
inline int cdeg(const std::vector<cplx>& p) {
  int d = static_cast<int>(p.size()) - 1;
  while (d >= 0 && std::abs(p[static_cast<std::size_t>(d)]) == 0.0) --d;
  return d;
}

inline cplx chorner(const std::vector<cplx>& p, cplx z) {
  cplx acc(0.0, 0.0);
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
  return acc;
}

inline std::vector<cplx> cderiv(const std::vector<cplx>& p) {
  if (p.size() <= 1) return {};
  std::vector<cplx> d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k)
    d[k - 1] = p[k] * static_cast<double>(k);
  return d;
}

inline std::vector<cplx> cmul(const std::vector<cplx>& a,
                              const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> p(a.size() + b.size() - 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) p[i + j] += a[i] * b[j];
  return p;
}

// An upper bound on |p| near z, used to make residuals relative.
inline double eval_scale(const std::vector<cplx>& p, cplx z) {
  double m = std::max(1.0, std::abs(z));
  double s = 0.0, zpow = 1.0;
  for (const cplx& c : p) {
    s += std::abs(c) * zpow;
    zpow *= m;
  }
  return std::max(s, 1e-300);
}

// Smallest k <= cap whose k-th derivative is relatively nonneglible at z;
// cap + 1 when every derivative up to cap is negligible.
inline int derivative_order(std::vector<cplx> p, cplx z, int cap,
                            double tol) {
  for (int k = 0; k <= cap; ++k) {
    if (cdeg(p) < 0) return cap + 1;
    if (std::abs(chorner(p, z)) / eval_scale(p, z) > tol) return k;
    p = cderiv(p);
  }
  return cap + 1;
}

// a + alpha * b on coefficient vectors, padded to the longer length.
inline std::vector<cplx> combine(const std::vector<cplx>& a, cplx alpha,
                                 const std::vector<cplx>& b) {
  std::vector<cplx> out(std::max(a.size(), b.size()), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < out.size(); ++k) {
    cplx av = k < a.size() ? a[k] : cplx(0.0, 0.0);
    cplx bv = k < b.size() ? b[k] : cplx(0.0, 0.0);
    out[k] = av + alpha * bv;
  }
  return out;
}

inline std::vector<cplx> mirror(const QPoly& p) {
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(p.degree() + 1));
  for (int k = 0; k <= p.degree(); ++k) out.push_back(p.coeff(k).to_complex());
  return out;
}

inline std::vector<cplx> reversed_c(const std::vector<cplx>& p, int width) {
  std::vector<cplx> out(static_cast<std::size_t>(width) + 1, cplx(0.0, 0.0));
  for (int k = 0; k <= width; ++k) {
    int src = width - k;
    if (src < static_cast<int>(p.size()))
      out[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(src)];
  }
  return out;
}

// The rational c such that dividing both polynomials by c leaves integral
// coefficients with collective gcd one.
inline GaussQ joint_content(const QPoly& n, const QPoly& d) {
  using boost::multiprecision::cpp_int;
  cpp_int g = 0, l = 1;
  auto absorb_rat = [&](const Rat& q) {
    if (q == 0) return;
    g = boost::multiprecision::gcd(
        g, boost::multiprecision::abs(boost::multiprecision::numerator(q)));
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(q));
  };
  auto absorb = [&](const QPoly& p) {
    for (int k = 0; k <= p.degree(); ++k) {
      absorb_rat(p.coeff(k).re);
      absorb_rat(p.coeff(k).im);
    }
  };
  absorb(n);
  absorb(d);
  if (g == 0) return GaussQ(1);
  return GaussQ(Rat(g, l), Rat(0));
}

struct ClusteredRoot {
  cplx point;
  int multiplicity;
};

inline bool lex_before(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Group raw roots into clusters, polish each cluster to the multiple root
// it claims to be, and cross-check the claimed multiplicity against the
// derivative order.  A cluster that fails the cross-check means the fiber
// has roots separated below the resolvable tolerance; refuse to guess.
inline std::vector<ClusteredRoot> cluster_with_multiplicity(
    const std::vector<cplx>& poly, std::vector<cplx> raw, const char* what) {
  constexpr double kClusterRadius = 3e-4;  // relative merge radius
  constexpr double kOrderTol = 1e-8;       // derivative-order threshold
  std::sort(raw.begin(), raw.end(), lex_before);
  struct Acc {
    cplx sum;
    int count;
  };
  std::vector<Acc> acc;
  for (cplx r : raw) {
    bool joined = false;
    for (Acc& a : acc) {
      cplx center = a.sum / static_cast<double>(a.count);
      if (std::abs(r - center) < kClusterRadius * (1.0 + std::abs(center))) {
        a.sum += r;
        ++a.count;
        joined = true;
        break;
      }
    }
    if (!joined) acc.push_back(Acc{r, 1});
  }
  std::vector<ClusteredRoot> out;
  for (const Acc& a : acc) {
    cplx center = a.sum / static_cast<double>(a.count);
    const int m = a.count;
    // An m-fold root is a simple root of the (m-1)-st derivative; polish
    // there, where Newton converges quadratically.
    std::vector<cplx> target = poly;
    for (int k = 0; k + 1 < m; ++k) target = cderiv(target);
    std::vector<cplx> target_d = cderiv(target);
    for (int step = 0; step < 3; ++step) {
      cplx dv = chorner(target_d, center);
      if (std::abs(dv) < 1e-280) break;
      center -= chorner(target, center) / dv;
    }
    int order = derivative_order(poly, center, m, kOrderTol);
    if (order != m)
      throw error(std::string(what) + ": root cluster of size " +
                  std::to_string(m) + " has derivative order " +
                  std::to_string(order) + "; separation below tolerance");
    out.push_back(ClusteredRoot{center, m});
  }
  std::sort(out.begin(), out.end(),
            [](const ClusteredRoot& x, const ClusteredRoot& y) {
              return lex_before(x.point, y.point);
            });
  return out;
}

}  // namespace detail

// All roots of a nonconstant complex polynomial (coefficients low to high),
// via the companion matrix plus two Newton polish steps, sorted by real
// then imaginary part.
inline std::vector<cplx> poly_roots(std::vector<cplx> coeffs) {
  while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  if (coeffs.size() <= 1)
    throw error("poly_roots: need a nonconstant polynomial");
  const std::size_t n = coeffs.size() - 1;
  const cplx lead = coeffs.back();
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k + 1 < n; ++k)
    companion(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) =
        1.0;
  for (std::size_t k = 0; k < n; ++k)
    companion(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n - 1)) =
        -coeffs[k] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw error("poly_roots: eigenvalue iteration failed");
  std::vector<cplx> deriv = detail::cderiv(coeffs);
  std::vector<cplx> roots;
  roots.reserve(n);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
    cplx z = solver.eigenvalues()(k);
    for (int step = 0; step < 2; ++step) {
      cplx dv = detail::chorner(deriv, z);
      if (std::abs(dv) < 1e-280) break;
      z -= detail::chorner(coeffs, z) / dv;
    }
    roots.push_back(z);
  }
  std::sort(roots.begin(), roots.end(), detail::lex_before);
  return roots;
}

// A rational self-map of the sphere in lowest terms.
struct RationalMap {
  bool exact = true;
  QPoly num, den;                // meaningful only when exact
  std::vector<cplx> cnum, cden;  // complex mirrors, always populated

  // Build from exact polynomials; removes common factors and the shared
  // rational content (so integer inputs keep their integer coefficients).
  static RationalMap from_exact(QPoly n, QPoly d) {
    if (d.is_zero()) throw error("rational map: zero denominator");
    if (!n.is_zero()) {
      QPoly g = poly_gcd(n, d);
      if (g.degree() > 0) {
        n = exact_div(n, g);
        d = exact_div(d, g);
      }
      GaussQ content = detail::joint_content(n, d);
      GaussQ inv = GaussQ(1) / content;
      n = inv * n;
      d = inv * d;
    }
    RationalMap m;
    m.exact = true;
    m.num = n;
    m.den = d;
    m.cnum = detail::mirror(n);
    m.cden = detail::mirror(d);
    return m;
  }

  // Build from complex coefficient vectors; no exact form is attached.
  static RationalMap from_complex(std::vector<cplx> n, std::vector<cplx> d) {
    while (!n.empty() && std::abs(n.back()) == 0.0) n.pop_back();
    while (!d.empty() && std::abs(d.back()) == 0.0) d.pop_back();
    if (d.empty()) throw error("rational map: zero denominator");
    RationalMap m;
    m.exact = false;
    m.cnum = std::move(n);
    m.cden = std::move(d);
    return m;
  }

  static RationalMap identity() {
    return from_exact(QPoly({GaussQ(0), GaussQ(1)}), QPoly({GaussQ(1)}));
  }

  int degree() const {
    if (exact && num.is_zero()) return 0;
    return std::max(detail::cdeg(cnum), std::max(detail::cdeg(cden), 0));
  }

  SpherePt eval(const SpherePt& p) const {
    const int dn = detail::cdeg(cnum), dd = detail::cdeg(cden);
    if (p.inf) {
      if (dn > dd) return SpherePt::infinity();
      if (dn < dd) return SpherePt::at(cplx(0.0, 0.0));
      return SpherePt::at(cnum[static_cast<std::size_t>(dn)] /
                          cden[static_cast<std::size_t>(dd)]);
    }
    cplx nv = detail::chorner(cnum, p.z), dv = detail::chorner(cden, p.z);
    if (std::abs(dv) == 0.0) {
      if (std::abs(nv) == 0.0)
        throw error("rational map: indeterminate value");
      return SpherePt::infinity();
    }
    return SpherePt::at(nv / dv);
  }

  GQPt eval_exact(const GQPt& p) const {
    if (!exact) throw error("eval_exact: map has no exact form");
    if (p.inf) {
      const int dn = num.degree(), dd = den.degree();
      if (dn > dd) return GQPt{GaussQ(), true};
      if (dn < dd) return GQPt{GaussQ(), false};
      return GQPt{num.lc() / den.lc(), false};
    }
    GaussQ nv = num.eval(p.z), dv = den.eval(p.z);
    if (dv.is_zero()) {
      if (nv.is_zero()) throw error("rational map: indeterminate value");
      return GQPt{GaussQ(), true};
    }
    return GQPt{nv / dv, false};
  }

  // Value of the derivative at a finite non-pole point.
  cplx derivative_at(cplx z) const {
    cplx nv = detail::chorner(cnum, z), dv = detail::chorner(cden, z);
    cplx nd = detail::chorner(detail::cderiv(cnum), z);
    cplx dd = detail::chorner(detail::cderiv(cden), z);
    if (std::abs(dv) == 0.0)
      throw error("derivative_at: evaluation at a pole");
    return (nd * dv - nv * dd) / (dv * dv);
  }

  // num' * den - num * den', the numerator of the derivative.
  QPoly wronskian() const {
    if (!exact) throw error("wronskian: map has no exact form");
    return num.derivative() * den - num * den.derivative();
  }

  struct Critical {
    std::vector<std::pair<cplx, int>> finite;  // point, multiplicity
    bool at_infinity = false;
  };

  Critical critical_points() const {
    Critical out;
    if (degree() < 1) throw error("critical_points: map is constant");
    if (exact) {
      QPoly w = wronskian();
      if (w.degree() >= 1) {
        auto parts = squarefree_split(w);
        for (std::size_t k = 0; k < parts.size(); ++k) {
          if (parts[k].degree() < 1) continue;
          for (cplx r : poly_roots(detail::mirror(parts[k])))
            out.finite.emplace_back(r, static_cast<int>(k + 1));
        }
      }
      out.at_infinity = local_degree(GQPt{GaussQ(), true}) > 1;
    } else {
      std::vector<cplx> w = detail::combine(
          detail::cmul(detail::cderiv(cnum), cden), cplx(-1.0, 0.0),
          detail::cmul(cnum, detail::cderiv(cden)));
      double scale = 0.0;
      for (const cplx& c : w) scale = std::max(scale, std::abs(c));
      while (!w.empty() && std::abs(w.back()) <= 1e-12 * scale) w.pop_back();
      if (detail::cdeg(w) >= 1) {
        auto clusters = detail::cluster_with_multiplicity(
            w, poly_roots(w), "critical_points");
        for (const auto& c : clusters)
          out.finite.emplace_back(c.point, c.multiplicity);
      }
      out.at_infinity = local_degree_numeric(SpherePt::infinity()) > 1;
    }
    std::sort(out.finite.begin(), out.finite.end(),
              [](const std::pair<cplx, int>& x, const std::pair<cplx, int>& y) {
                return detail::lex_before(x.first, y.first);
              });
    return out;
  }

  // The fiber over w as (point, multiplicity) pairs; multiplicities sum to
  // the degree, with infinity carrying the degree drop of the fiber
  // polynomial.  Throws when nearby fiber roots cannot be told apart from a
  // genuine multiple root.
  std::vector<std::pair<SpherePt, int>> preimages(const SpherePt& w) const {
    const int deg = degree();
    if (deg < 1) throw error("preimages: map is constant");
    std::size_t width = std::max(cnum.size(), cden.size());
    std::vector<cplx> fiber(width, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < width; ++k) {
      cplx nk = k < cnum.size() ? cnum[k] : cplx(0.0, 0.0);
      cplx dk = k < cden.size() ? cden[k] : cplx(0.0, 0.0);
      fiber[k] = w.inf ? dk : nk - w.z * dk;
    }
    double scale = 0.0;
    for (const cplx& c : fiber) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw error("preimages: fiber polynomial vanished");
    while (!fiber.empty() && std::abs(fiber.back()) <= 1e-12 * scale)
      fiber.pop_back();
    const int fdeg = static_cast<int>(fiber.size()) - 1;
    const int inf_mult = deg - fdeg;
    std::vector<std::pair<SpherePt, int>> out;
    if (fdeg >= 1) {
      auto clusters = detail::cluster_with_multiplicity(
          fiber, poly_roots(fiber), "preimages");
      for (const auto& c : clusters)
        out.emplace_back(SpherePt::at(c.point), c.multiplicity);
    }
    if (inf_mult > 0) out.emplace_back(SpherePt::infinity(), inf_mult);
    return out;
  }

  // Exact local degree at an exact point: the order of vanishing of
  // num * den(p) - den * num(p) at p (the denominator's order at a pole),
  // computed in the inverted chart over infinity.
  int local_degree(const GQPt& p) const {
    if (!exact) throw error("local_degree: map has no exact form");
    QPoly n = num, d = den;
    GaussQ at = p.z;
    if (p.inf) {
      const int width = std::max(num.degree(), den.degree());
      n = num.reversed(width);
      d = den.reversed(width);
      at = GaussQ();
    }
    GaussQ nv = n.eval(at), dv = d.eval(at);
    QPoly g = dv.is_zero() ? d : dv * n - nv * d;
    if (g.is_zero()) throw error("local_degree: map is constant");
    QPoly linear(std::vector<GaussQ>{-at, GaussQ(1)});
    int order = 0;
    while (g.degree() >= 1 && g.eval(at).is_zero()) {
      g = exact_div(g, linear);
      ++order;
    }
    if (order < 1) throw error("local_degree: order detection failed");
    return order;
  }

  // Numeric local degree: derivative order of the fiber function at p.
  int local_degree_numeric(const SpherePt& p) const {
    const int deg = degree();
    if (deg < 1) throw error("local_degree: map is constant");
    std::vector<cplx> n = cnum, d = cden;
    cplx at = p.z;
    if (p.inf) {
      n = detail::reversed_c(cnum, deg);
      d = detail::reversed_c(cden, deg);
      at = cplx(0.0, 0.0);
    }
    cplx nv = detail::chorner(n, at), dv = detail::chorner(d, at);
    std::vector<cplx> g;
    if (std::abs(dv) <= 1e-8 * detail::eval_scale(d, at)) {
      g = d;
    } else {
      std::size_t width = std::max(n.size(), d.size());
      g.assign(width, cplx(0.0, 0.0));
      for (std::size_t k = 0; k < width; ++k) {
        cplx nk = k < n.size() ? n[k] : cplx(0.0, 0.0);
        cplx dk = k < d.size() ? d[k] : cplx(0.0, 0.0);
        g[k] = nk * dv - dk * nv;
      }
    }
    int order = detail::derivative_order(g, at, deg, 1e-8);
    if (order < 1 || order > deg)
      throw error("local_degree: order detection failed");
    return order;
  }
};

// A Moebius transformation z -> (az + b)/(cz + d) with complex entries.
struct MobiusC {
  cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

  SpherePt apply(const SpherePt& p) const {
    if (p.inf) {
      if (std::abs(c) == 0.0) return SpherePt::infinity();
      return SpherePt::at(a / c);
    }
    cplx denom = c * p.z + d;
    if (std::abs(denom) == 0.0) return SpherePt::infinity();
    return SpherePt::at((a * p.z + b) / denom);
  }

  MobiusC inverse() const { return MobiusC{d, -b, -c, a}; }

  // The unique transformation sending p0, p1, pinf to 0, 1, infinity.
  static MobiusC to_zero_one_inf(cplx p0, cplx p1, cplx pinf) {
    return MobiusC{p1 - pinf, -p0 * (p1 - pinf), p1 - p0, -pinf * (p1 - p0)};
  }
};

// Post-compose a rational map with a Moebius transformation.
inline RationalMap compose_mobius(const MobiusC& M, const RationalMap& m) {
  std::size_t width = std::max(m.cnum.size(), m.cden.size());
  std::vector<cplx> n(width, cplx(0.0, 0.0)), d(width, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < width; ++k) {
    cplx nk = k < m.cnum.size() ? m.cnum[k] : cplx(0.0, 0.0);
    cplx dk = k < m.cden.size() ? m.cden[k] : cplx(0.0, 0.0);
    n[k] = M.a * nk + M.b * dk;
    d[k] = M.c * nk + M.d * dk;
  }
  return RationalMap::from_complex(std::move(n), std::move(d));
}

}  // namespace corrx
