#pragma once
// Univariate polynomials over the Gaussian rationals: exact division,
// gcd, squarefree structure, and resultants (including elimination of one
// variable from a bivariate pair, used for period-2 cycle systems).
//
// Coefficients are stored low degree first, with no trailing zeros; the
// zero polynomial has an empty coefficient list and degree -1.

#include <cstddef>
#include <utility>
#include <vector>

#include "common.hpp"
#include "gaussian_rational.hpp"

namespace corrx {

class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<GaussQ> coeffs) : c_(std::move(coeffs)) { trim(); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<GaussQ>& coeffs() const { return c_; }

  GaussQ coeff(int k) const {
    if (k < 0 || k > degree()) return GaussQ();
    return c_[static_cast<std::size_t>(k)];
  }
  GaussQ lc() const {
    if (is_zero()) throw error("QPoly: leading coefficient of zero");
    return c_.back();
  }

  GaussQ eval(const GaussQ& x) const {
    GaussQ acc;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
  }

  QPoly derivative() const {
    if (c_.size() <= 1) return QPoly();
    std::vector<GaussQ> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
      d[k - 1] = GaussQ(static_cast<long long>(k)) * c_[k];
    return QPoly(std::move(d));
  }

  QPoly monic() const {
    if (is_zero()) return QPoly();
    QPoly out = *this;
    GaussQ inv = GaussQ(1) / c_.back();
    for (auto& x : out.c_) x = x * inv;
    return out;
  }

  // Coefficient list of p(1/x) cleared to degree `width` (chart swap at
  // infinity); width must be at least degree().
  QPoly reversed(int width) const {
    if (width < degree()) throw error("QPoly: reversal width too small");
    std::vector<GaussQ> r(static_cast<std::size_t>(width) + 1);
    for (int k = 0; k <= degree(); ++k)
      r[static_cast<std::size_t>(width - k)] = coeff(k);
    return QPoly(std::move(r));
  }

  friend QPoly operator+(const QPoly& a, const QPoly& b) {
    std::vector<GaussQ> s(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < s.size(); ++k)
      s[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
    return QPoly(std::move(s));
  }
  friend QPoly operator-(const QPoly& a, const QPoly& b) {
    std::vector<GaussQ> s(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < s.size(); ++k)
      s[k] = a.coeff(static_cast<int>(k)) - b.coeff(static_cast<int>(k));
    return QPoly(std::move(s));
  }
  friend QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    std::vector<GaussQ> p(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        p[i + j] = p[i + j] + a.c_[i] * b.c_[j];
    }
    return QPoly(std::move(p));
  }
  friend QPoly operator*(const GaussQ& s, const QPoly& a) {
    QPoly out = a;
    for (auto& x : out.c_) x = s * x;
    out.trim();
    return out;
  }
  friend bool operator==(const QPoly& a, const QPoly& b) {
    return a.c_ == b.c_;
  }
  friend bool operator!=(const QPoly& a, const QPoly& b) { return !(a == b); }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<GaussQ> c_;
};

// Quotient and remainder: a = q*b + r with deg r < deg b.
inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw error("QPoly: division by zero polynomial");
  if (a.degree() < b.degree()) return {QPoly(), a};
  std::vector<GaussQ> rem(a.coeffs().begin(), a.coeffs().end());
  std::vector<GaussQ> quot(
      static_cast<std::size_t>(a.degree() - b.degree()) + 1);
  GaussQ inv_lc = GaussQ(1) / b.lc();
  for (int k = a.degree() - b.degree(); k >= 0; --k) {
    GaussQ factor =
        rem[static_cast<std::size_t>(k + b.degree())] * inv_lc;
    quot[static_cast<std::size_t>(k)] = factor;
    if (factor.is_zero()) continue;
    for (int j = 0; j <= b.degree(); ++j)
      rem[static_cast<std::size_t>(k + j)] =
          rem[static_cast<std::size_t>(k + j)] - factor * b.coeff(j);
  }
  return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

inline QPoly exact_div(const QPoly& a, const QPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw error("QPoly: exact division has remainder");
  return q;
}

// Monic gcd by the Euclidean algorithm (coefficients form a field).
inline QPoly poly_gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.monic();
}

inline QPoly poly_pow(const QPoly& a, int n) {
  if (n < 0) throw error("QPoly: negative power");
  QPoly acc({GaussQ(1)});
  for (int k = 0; k < n; ++k) acc = acc * a;
  return acc;
}

// Radical: product of distinct irreducible factors, monic.
inline QPoly squarefree_part(const QPoly& f) {
  if (f.degree() <= 0) return f.monic();
  return exact_div(f, poly_gcd(f, f.derivative())).monic();
}

// Yun's squarefree decomposition: returns monic parts p_1, ..., p_m with
// f = lc(f) * prod p_k^k; slot k-1 of the result holds p_k.
inline std::vector<QPoly> squarefree_split(const QPoly& f) {
  if (f.is_zero()) throw error("QPoly: squarefree split of zero");
  std::vector<QPoly> parts;
  if (f.degree() == 0) return parts;
  // Work with the monic form; gcds are monic, so every intermediate divisor
  // chain keeps consistent scaling without further normalization.
  QPoly fm = f.monic();
  QPoly g = poly_gcd(fm, fm.derivative());
  QPoly w = exact_div(fm, g);
  QPoly y = exact_div(fm.derivative(), g);
  while (w.degree() > 0) {
    QPoly z = y - w.derivative();
    QPoly p = poly_gcd(w, z);
    parts.push_back(p);
    w = exact_div(w, p);
    y = exact_div(z, p);
  }
  // Trim trailing trivial parts but keep interior ones aligned by index.
  while (!parts.empty() && parts.back().degree() == 0) parts.pop_back();
  return parts;
}

namespace detail {

// Fraction-free Bareiss determinant over an integral domain T.
// T needs *, -, is_zero, and an exact_div hook (see overloads below).
inline QPoly det_exact_div(const QPoly& a, const QPoly& b) {
  return exact_div(a, b);
}
inline GaussQ det_exact_div(const GaussQ& a, const GaussQ& b) { return a / b; }

template <class T>
T bareiss_det(std::vector<std::vector<T>> m, const T& one) {
  std::size_t n = m.size();
  if (n == 0) throw error("bareiss_det: empty matrix");
  T prev = one;
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == n) return T();  // singular
      std::swap(m[k], m[swap_row]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        T num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = det_exact_div(num, prev);
      }
      m[i][k] = T();
    }
    prev = m[k][k];
  }
  T det = m[n - 1][n - 1];
  if (negate) det = T() - det;
  return det;
}

// Sylvester matrix of p (degree m) and q (degree n) with entries in T.
// Row i < n carries the coefficients of p shifted by i, descending.
template <class T>
std::vector<std::vector<T>> sylvester(const std::vector<T>& p,
                                      const std::vector<T>& q) {
  int m = static_cast<int>(p.size()) - 1;
  int n = static_cast<int>(q.size()) - 1;
  if (m < 0 || n < 0) throw error("sylvester: zero polynomial");
  std::size_t size = static_cast<std::size_t>(m + n);
  if (size == 0) throw error("sylvester: both polynomials constant");
  std::vector<std::vector<T>> s(size, std::vector<T>(size, T()));
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k)
      s[static_cast<std::size_t>(row)][static_cast<std::size_t>(row + k)] =
          p[static_cast<std::size_t>(m - k)];
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k)
      s[static_cast<std::size_t>(n + row)][static_cast<std::size_t>(row + k)] =
          q[static_cast<std::size_t>(n - k)];
  return s;
}

}  // namespace detail

// Resultant of two univariate polynomials, Res(p, q) = lc(p)^deg q *
// prod q(alpha) over the roots alpha of p.
inline GaussQ resultant(const QPoly& p, const QPoly& q) {
  if (p.is_zero() || q.is_zero()) throw error("resultant: zero polynomial");
  if (p.degree() == 0 && q.degree() == 0) return GaussQ(1);
  if (p.degree() == 0) {
    GaussQ acc(1);
    for (int k = 0; k < q.degree(); ++k) acc = acc * p.coeff(0);
    return acc;
  }
  if (q.degree() == 0) {
    GaussQ acc(1);
    for (int k = 0; k < p.degree(); ++k) acc = acc * q.coeff(0);
    return acc;
  }
  return detail::bareiss_det(detail::sylvester(p.coeffs(), q.coeffs()),
                             GaussQ(1));
}

// Eliminate y from two bivariate polynomials given as y-coefficient lists
// (entry k = coefficient of y^k, itself a polynomial in x).  Returns
// Res_y(P, Q) as a polynomial in x.
inline QPoly resultant_y(std::vector<QPoly> p, std::vector<QPoly> q) {
  auto trim = [](std::vector<QPoly>& v) {
    while (!v.empty() && v.back().is_zero()) v.pop_back();
  };
  trim(p);
  trim(q);
  if (p.empty() || q.empty()) throw error("resultant_y: zero polynomial");
  if (p.size() == 1 && q.size() == 1) return QPoly({GaussQ(1)});
  if (p.size() == 1) return poly_pow(p[0], static_cast<int>(q.size()) - 1);
  if (q.size() == 1) return poly_pow(q[0], static_cast<int>(p.size()) - 1);
  return detail::bareiss_det(detail::sylvester(p, q), QPoly({GaussQ(1)}));
}

}  // namespace corrx
