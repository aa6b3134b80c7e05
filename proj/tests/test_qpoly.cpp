// Exact Gaussian-rational arithmetic and polynomial algebra.
//
// The resultant is checked against an independent oracle implemented here:
// the textbook Sylvester matrix expanded by minors (no elimination), plus
// algebraic identities (specialization, multiplicativity, common factors).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <corrx/common.hpp>
#include <corrx/gaussian_rational.hpp>
#include <corrx/qpoly.hpp>

#include <random>
#include <vector>

using corrx::GaussQ;
using corrx::QPoly;
using corrx::Rat;

namespace {

std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);

Rat rnd_rat() {
  long long num = static_cast<long long>(corrx::bounded_draw(rng, 19)) - 9;
  long long den = 1 + static_cast<long long>(corrx::bounded_draw(rng, 5));
  return Rat(num) / Rat(den);
}

GaussQ rnd_gq() { return GaussQ(rnd_rat(), rnd_rat()); }

GaussQ rnd_gq_nonzero() {
  for (;;) {
    GaussQ g = rnd_gq();
    if (!g.is_zero()) return g;
  }
}

QPoly rnd_poly(int deg) {
  std::vector<GaussQ> c(static_cast<std::size_t>(deg) + 1);
  for (auto& x : c) x = rnd_gq();
  c.back() = rnd_gq_nonzero();
  return QPoly(c);
}

// x - r as a polynomial.
QPoly linear_root(const GaussQ& r) { return QPoly({GaussQ() - r, GaussQ(1)}); }

// Independent resultant oracle: Sylvester matrix + Laplace expansion.
GaussQ det_by_minors(std::vector<std::vector<GaussQ>> m) {
  std::size_t n = m.size();
  if (n == 1) return m[0][0];
  GaussQ acc;
  GaussQ sign(1);
  for (std::size_t j = 0; j < n; ++j) {
    if (!m[0][j].is_zero()) {
      std::vector<std::vector<GaussQ>> sub(n - 1);
      for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          if (k != j) sub[i - 1].push_back(m[i][k]);
      acc = acc + sign * m[0][j] * det_by_minors(std::move(sub));
    }
    sign = GaussQ() - sign;
  }
  return acc;
}

GaussQ sylvester_resultant_oracle(const QPoly& p, const QPoly& q) {
  int m = p.degree(), n = q.degree();
  REQUIRE(m >= 1);
  REQUIRE(n >= 1);
  std::size_t size = static_cast<std::size_t>(m + n);
  std::vector<std::vector<GaussQ>> s(size, std::vector<GaussQ>(size));
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k)
      s[static_cast<std::size_t>(row)][static_cast<std::size_t>(row + k)] =
          p.coeff(m - k);
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k)
      s[static_cast<std::size_t>(n + row)][static_cast<std::size_t>(row + k)] =
          q.coeff(n - k);
  return det_by_minors(std::move(s));
}

}  // namespace

TEST_CASE("gaussian rational field arithmetic") {
  GaussQ zero, one(1);
  CHECK(zero.is_zero());
  CHECK(one == GaussQ(Rat(1), Rat(0)));
  for (int trial = 0; trial < 200; ++trial) {
    GaussQ a = rnd_gq(), b = rnd_gq(), c = rnd_gq();
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == zero);
    CHECK(a * one == a);
    if (!a.is_zero()) {
      CHECK(a / a == one);
      CHECK((b / a) * a == b);
    }
    CHECK(a * a.conj() == GaussQ(a.norm2(), Rat(0)));
  }
  GaussQ i(Rat(0), Rat(1));
  CHECK(i * i == GaussQ(-1));
}

TEST_CASE("gaussian rational parsing and formatting") {
  struct Case {
    const char* text;
    GaussQ value;
  };
  const Case cases[] = {
      {"3/4", GaussQ(Rat(3) / 4, Rat(0))},
      {"-2", GaussQ(-2)},
      {"0", GaussQ()},
      {"1/2+3/4*i", GaussQ(Rat(1) / 2, Rat(3) / 4)},
      {"1/2-3/4*i", GaussQ(Rat(1) / 2, Rat(-3) / 4)},
      {"-5/3+2*i", GaussQ(Rat(-5) / 3, Rat(2))},
      {"i", GaussQ(Rat(0), Rat(1))},
      {"-i", GaussQ(Rat(0), Rat(-1))},
      {"3*i", GaussQ(Rat(0), Rat(3))},
      {"-2/7*i", GaussQ(Rat(0), Rat(-2) / 7)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(GaussQ::parse(c.text) == c.value);
  }
  // Round trip through the canonical formatter.
  for (int trial = 0; trial < 100; ++trial) {
    GaussQ g = rnd_gq();
    CHECK(GaussQ::parse(g.to_string()) == g);
  }
  CHECK_THROWS_AS(GaussQ::parse("1/2+i*i"), corrx::error);
  CHECK_THROWS_AS(GaussQ::parse(""), corrx::error);
  // Conversion to floating point.
  GaussQ g(Rat(3) / 4, Rat(-1) / 8);
  CHECK(g.to_complex() == std::complex<double>(0.75, -0.125));
}

TEST_CASE("polynomial arithmetic and evaluation") {
  // (x - 1)(x + 2) = x^2 + x - 2, checked coefficientwise and by evaluation.
  QPoly p = linear_root(GaussQ(1)) * linear_root(GaussQ(-2));
  CHECK(p.degree() == 2);
  CHECK(p.coeff(0) == GaussQ(-2));
  CHECK(p.coeff(1) == GaussQ(1));
  CHECK(p.coeff(2) == GaussQ(1));
  for (int trial = 0; trial < 50; ++trial) {
    QPoly a = rnd_poly(static_cast<int>(corrx::bounded_draw(rng, 5)));
    QPoly b = rnd_poly(static_cast<int>(corrx::bounded_draw(rng, 5)));
    GaussQ x = rnd_gq();
    CHECK((a + b).eval(x) == a.eval(x) + b.eval(x));
    CHECK((a - b).eval(x) == a.eval(x) - b.eval(x));
    CHECK((a * b).eval(x) == a.eval(x) * b.eval(x));
  }
  // Derivative is linear and satisfies the product rule.
  for (int trial = 0; trial < 20; ++trial) {
    QPoly a = rnd_poly(3), b = rnd_poly(4);
    CHECK((a * b).derivative() == a.derivative() * b + a * b.derivative());
  }
}

TEST_CASE("division with remainder") {
  for (int trial = 0; trial < 100; ++trial) {
    QPoly a = rnd_poly(static_cast<int>(corrx::bounded_draw(rng, 7)));
    QPoly b = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 4)));
    auto [q, r] = corrx::divmod(a, b);
    CHECK(q * b + r == a);
    CHECK(r.degree() < b.degree());
  }
  // Exact division succeeds on products and rejects non-multiples.
  QPoly u = rnd_poly(3), v = rnd_poly(2);
  CHECK(corrx::exact_div(u * v, v) == u);
  QPoly w = u * v + QPoly({GaussQ(1)});
  CHECK_THROWS_AS(corrx::exact_div(w, v), corrx::error);
}

TEST_CASE("polynomial gcd via planted common factors") {
  for (int trial = 0; trial < 40; ++trial) {
    QPoly c = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 3)));
    QPoly a = rnd_poly(2), b = rnd_poly(3);
    QPoly g = corrx::poly_gcd(a * c, b * c);
    // The planted factor divides the gcd; the gcd divides both inputs.
    CHECK(corrx::divmod(g, c).second.is_zero());
    CHECK(corrx::divmod(a * c, g).second.is_zero());
    CHECK(corrx::divmod(b * c, g).second.is_zero());
    // gcd is monic by normalization.
    CHECK(g.lc() == GaussQ(1));
  }
  // Coprime linears have trivial gcd.
  QPoly g = corrx::poly_gcd(linear_root(GaussQ(1)), linear_root(GaussQ(2)));
  CHECK(g.degree() == 0);
}

TEST_CASE("resultant matches Sylvester determinant oracle") {
  // Frozen convention anchor: Res(x-u, x-v) = u - v.
  GaussQ u = rnd_gq(), v = rnd_gq();
  CHECK(corrx::resultant(linear_root(u), linear_root(v)) == u - v);
  for (int trial = 0; trial < 30; ++trial) {
    QPoly a = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 4)));
    QPoly b = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 4)));
    CHECK(corrx::resultant(a, b) == sylvester_resultant_oracle(a, b));
  }
}

TEST_CASE("resultant algebraic identities") {
  for (int trial = 0; trial < 25; ++trial) {
    QPoly a = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 3)));
    QPoly b = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 3)));
    QPoly c = rnd_poly(1 + static_cast<int>(corrx::bounded_draw(rng, 3)));
    // Multiplicative in the second argument.
    CHECK(corrx::resultant(a, b * c) ==
          corrx::resultant(a, b) * corrx::resultant(a, c));
    // Zero iff a common root exists.
    QPoly shared = linear_root(rnd_gq());
    CHECK(corrx::resultant(a * shared, b * shared).is_zero());
    GaussQ r = corrx::resultant(a, b);
    QPoly g = corrx::poly_gcd(a, b);
    CHECK(r.is_zero() == (g.degree() >= 1));
  }
}

TEST_CASE("bivariate resultant specializes correctly") {
  // P, Q are polynomials in y whose coefficients are polynomials in x.
  // Evaluating the eliminant at x0 must agree with eliminating after
  // substituting x0, whenever the y-leading coefficients survive.
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<QPoly> p(1 + 1 + corrx::bounded_draw(rng, 2));
    std::vector<QPoly> q(1 + 1 + corrx::bounded_draw(rng, 2));
    for (auto& e : p) e = rnd_poly(static_cast<int>(corrx::bounded_draw(rng, 3)));
    for (auto& e : q) e = rnd_poly(static_cast<int>(corrx::bounded_draw(rng, 3)));
    QPoly elim = corrx::resultant_y(p, q);
    for (int k = 0; k < 4; ++k) {
      GaussQ x0 = rnd_gq();
      if (p.back().eval(x0).is_zero() || q.back().eval(x0).is_zero()) continue;
      std::vector<GaussQ> pc, qc;
      for (const auto& e : p) pc.push_back(e.eval(x0));
      for (const auto& e : q) qc.push_back(e.eval(x0));
      CHECK(corrx::resultant(QPoly(pc), QPoly(qc)) == elim.eval(x0));
    }
  }
}

TEST_CASE("squarefree decomposition recovers planted multiplicities") {
  QPoly u = linear_root(GaussQ(Rat(1) / 2, Rat(0)));
  QPoly v = linear_root(GaussQ(Rat(-2), Rat(0))) *
            linear_root(GaussQ(Rat(0), Rat(1)));
  // f = u^3 v^2 (u, v coprime, v squarefree of degree 2).
  QPoly f = corrx::poly_pow(u, 3) * corrx::poly_pow(v, 2) *
            QPoly({GaussQ(Rat(5) / 3, Rat(0))});
  auto parts = corrx::squarefree_split(f);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].degree() == 0);  // multiplicity 1: nothing
  CHECK(parts[1] == v.monic());   // multiplicity 2
  CHECK(parts[2] == u.monic());   // multiplicity 3
  // Product reconstructs f up to the leading unit.
  QPoly rebuilt = parts[0] * corrx::poly_pow(parts[1], 2) *
                  corrx::poly_pow(parts[2], 3);
  CHECK(rebuilt.monic() == f.monic());
  // Radical contains every root exactly once.
  QPoly rad = corrx::squarefree_part(f);
  CHECK(rad == (u * v).monic());
  // Random reconstruction property.
  for (int trial = 0; trial < 10; ++trial) {
    QPoly a = rnd_poly(2);
    QPoly g = corrx::poly_pow(a, 2) * rnd_poly(1);
    auto split = corrx::squarefree_split(g);
    QPoly acc({GaussQ(1)});
    for (std::size_t k = 0; k < split.size(); ++k)
      acc = acc * corrx::poly_pow(split[k], static_cast<int>(k) + 1);
    CHECK(acc.monic() == g.monic());
  }
}
