#pragma once
// Exact 2x2 integer matrices and the representation of the punctured-sphere
// fundamental group into the level-2 congruence group.
//
// Generators (rank 2): a -> [[1,2],[0,1]] (parabolic fixing infinity),
// b -> [[1,0],[-2,1]] (parabolic fixing 0). Then ab = [[-3,2],[-2,1]] has
// trace -2 and fixes 1, so each peripheral loop about a puncture maps to a
// parabolic about the matching cusp of the modular lambda function
// (lambda(i*inf)=0, lambda(0)=1, lambda(1)=inf). The induced map to
// PSL(2,Z) is faithful on the free group.

#include <complex>
#include <cstdint>
#include <string>

#include "corrx/common.hpp"
#include "corrx/words.hpp"

namespace corrx {

struct Mat2 {
  long long a = 1, b = 0, c = 0, d = 1;  // row-major [[a,b],[c,d]]

  bool operator==(const Mat2&) const = default;

  long long det() const { return checked_add(checked_mul(a, d), -checked_mul(b, c)); }
  long long trace() const { return checked_add(a, d); }

  Mat2 operator*(const Mat2& o) const {
    return Mat2{checked_add(checked_mul(a, o.a), checked_mul(b, o.c)),
                checked_add(checked_mul(a, o.b), checked_mul(b, o.d)),
                checked_add(checked_mul(c, o.a), checked_mul(d, o.c)),
                checked_add(checked_mul(c, o.b), checked_mul(d, o.d))};
  }

  // Inverse for unimodular matrices (det = +-1).
  Mat2 inverse() const {
    long long dt = det();
    if (dt == 1) return Mat2{d, -b, -c, a};
    if (dt == -1) return Mat2{-d, b, c, -a};
    throw error("Mat2::inverse: determinant is not +-1");
  }

  Mat2 neg() const { return Mat2{-a, -b, -c, -d}; }

  std::string str() const {
    return "[[" + std::to_string(a) + "," + std::to_string(b) + "],[" +
           std::to_string(c) + "," + std::to_string(d) + "]]";
  }

 private:
  static long long checked_mul(long long x, long long y) {
    __int128 p = static_cast<__int128>(x) * y;
    if (p > INT64_MAX / 4 || p < INT64_MIN / 4)
      throw error("Mat2: integer overflow (word too long for exact matrices)");
    return static_cast<long long>(p);
  }
  static long long checked_add(long long x, long long y) {
    __int128 s = static_cast<__int128>(x) + y;
    if (s > INT64_MAX / 4 || s < INT64_MIN / 4)
      throw error("Mat2: integer overflow (word too long for exact matrices)");
    return static_cast<long long>(s);
  }
};

inline Mat2 generator_matrix(Letter l) {
  switch (l) {
    case 1:  return Mat2{1, 2, 0, 1};    // a
    case -1: return Mat2{1, -2, 0, 1};
    case 2:  return Mat2{1, 0, -2, 1};   // b
    case -2: return Mat2{1, 0, 2, 1};
    default: throw error("generator_matrix: only rank-2 words have matrices");
  }
}

inline Mat2 to_matrix(const Word& w) {
  Mat2 m;
  for (Letter l : w.letters()) m = m * generator_matrix(l);
  return m;
}

enum class IsometryType { identity, parabolic, hyperbolic, elliptic };

// Classification in PSL(2,R) by |trace| (exact, unimodular input).
inline IsometryType classify(const Mat2& m) {
  if (m.det() != 1) throw error("classify: determinant must be 1");
  if ((m == Mat2{}) || (m == Mat2{}.neg())) return IsometryType::identity;
  long long t = m.trace();
  if (t == 2 || t == -2) return IsometryType::parabolic;
  if (t > 2 || t < -2) return IsometryType::hyperbolic;
  return IsometryType::elliptic;
}

// Moebius action on the upper half-plane (finite points only).
inline std::complex<double> mobius(const Mat2& m, std::complex<double> z) {
  std::complex<double> den = static_cast<double>(m.c) * z + static_cast<double>(m.d);
  if (std::abs(den) == 0.0) throw error("mobius: image is the point at infinity");
  return (static_cast<double>(m.a) * z + static_cast<double>(m.b)) / den;
}

// Moebius action on the boundary R U {inf}; infinity encoded as (1,0) slope
// pair (p,q) meaning p/q.
struct BoundaryPt {
  long long p = 1, q = 0;  // p/q in lowest terms, q >= 0; (1,0) = infinity
  bool operator==(const BoundaryPt&) const = default;
};

inline BoundaryPt boundary_apply(const Mat2& m, const BoundaryPt& x) {
  __int128 p = static_cast<__int128>(m.a) * x.p + static_cast<__int128>(m.b) * x.q;
  __int128 q = static_cast<__int128>(m.c) * x.p + static_cast<__int128>(m.d) * x.q;
  if (p == 0 && q == 0) throw error("boundary_apply: degenerate image");
  // Reduce: for unimodular m and coprime input the image is already coprime;
  // normalize the sign so q >= 0 (and p > 0 when q == 0).
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  if (p > INT64_MAX || p < INT64_MIN || q > INT64_MAX)
    throw error("boundary_apply: overflow");
  return BoundaryPt{static_cast<long long>(p), static_cast<long long>(q)};
}

}  // namespace corrx
