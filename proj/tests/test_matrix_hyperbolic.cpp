#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "corrx/hyperbolic.hpp"
#include "corrx/matrix2.hpp"
#include "corrx/words.hpp"

using namespace corrx;

namespace {
// Oracle: cosh-form distance, independent of the asinh form in the library.
double cosh_form_dist(cplx z, cplx w) {
  double q = 1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag());
  return std::acosh(q);
}

cplx random_point(std::mt19937_64& rng) {
  auto u = [&] { return static_cast<double>(bounded_draw(rng, 2000001)) / 1e6 - 1.0; };
  return {3.0 * u(), 0.05 + 2.0 * std::abs(u())};
}
}  // namespace

TEST_CASE("generator matrices and the group homomorphism") {
  CHECK(to_matrix(Word::parse("a")) == Mat2{1, 2, 0, 1});
  CHECK(to_matrix(Word::parse("b")) == Mat2{1, 0, -2, 1});
  CHECK(to_matrix(Word::parse("ab")) == Mat2{-3, 2, -2, 1});
  CHECK(to_matrix(Word::parse("ab")).trace() == -2);
  CHECK(to_matrix(Word::parse("abAB")) == Mat2{13, 8, 8, 5});

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Word u = random_reduced_word(2, trial % 10, rng);
    Word v = random_reduced_word(2, (trial * 5) % 10, rng);
    Mat2 mu = to_matrix(u), mv = to_matrix(v);
    CHECK(mu.det() == 1);
    CHECK(to_matrix(u * v) == mu * mv);
    CHECK(to_matrix(u.inverse()) == mu.inverse());
  }
}

TEST_CASE("faithfulness on a ball: only the identity maps to +-I") {
  Mat2 I, negI = Mat2{}.neg();
  for_each_in_ball(2, 7, [&](const Word& w) {
    Mat2 m = to_matrix(w);
    if (w.empty()) {
      CHECK(m == I);
    } else {
      CHECK(m != I);
      CHECK(m != negI);
    }
  });
}

TEST_CASE("parabolic if and only if peripheral, over a whole ball") {
  for_each_in_ball(2, 7, [&](const Word& w) {
    if (w.empty()) return;
    bool parab = classify(to_matrix(w)) == IsometryType::parabolic;
    bool perip = peripheral_class(w, 2).has_value();
    CHECK(parab == perip);
  });
}

TEST_CASE("isometry classification by trace") {
  CHECK(classify(Mat2{}) == IsometryType::identity);
  CHECK(classify(Mat2{}.neg()) == IsometryType::identity);
  CHECK(classify(Mat2{0, -1, 1, 0}) == IsometryType::elliptic);
  CHECK(classify(to_matrix(Word::parse("a"))) == IsometryType::parabolic);
  CHECK(classify(to_matrix(Word::parse("aB"))) == IsometryType::hyperbolic);
  CHECK_THROWS_AS(classify(Mat2{2, 0, 0, 1}), error);
}

TEST_CASE("exact matrices refuse to overflow silently") {
  CHECK_THROWS_AS(to_matrix(Word::parse("(aB)^50")), error);
}

TEST_CASE("distance agrees with the cosh-form oracle and is an invariant") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    cplx z = random_point(rng), w = random_point(rng);
    double d = hyp_dist(z, w);
    CHECK(d == doctest::Approx(cosh_form_dist(z, w)).epsilon(1e-11));
    CHECK(hyp_dist(z, z) == 0.0);
    Word g = random_reduced_word(2, trial % 7, rng);
    Mat2 m = to_matrix(g);
    CHECK(hyp_dist(mobius(m, z), mobius(m, w)) == doctest::Approx(d).epsilon(1e-9));
  }
  CHECK_THROWS_AS(hyp_dist(cplx(0, -1), cplx(0, 1)), error);
}

TEST_CASE("norms of peripheral powers: ||a^n|| = 2 asinh(n) at the base point i") {
  for (int n : {1, 2, 5, 31, 1024}) {
    Word an = Word::parse("a").pow(n);
    CHECK(norm_at(an) ==
          doctest::Approx(2.0 * std::asinh(static_cast<double>(n))).epsilon(1e-12));
  }
  CHECK(norm_at(Word::parse("a")) == doctest::Approx(std::acosh(3.0)).epsilon(1e-12));
  // At a different basepoint the norm changes but stays positive.
  CHECK(norm_at(Word::parse("a"), cplx(0.0, 2.0)) ==
        doctest::Approx(2.0 * std::asinh(0.5)).epsilon(1e-12));
}

TEST_CASE("translation lengths: shortest closed geodesic has trace 6") {
  CHECK(translation_length(to_matrix(Word::parse("aB"))) ==
        doctest::Approx(2.0 * std::acosh(3.0)).epsilon(1e-12));
  CHECK(translation_length(to_matrix(Word::parse("abAB"))) ==
        doctest::Approx(2.0 * std::acosh(9.0)).epsilon(1e-12));
  CHECK(translation_length(to_matrix(Word::parse("a"))) == 0.0);
  // Conjugation invariance.
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    Word g = random_reduced_word(2, 1 + trial % 6, rng);
    Word w = random_reduced_word(2, 1 + trial % 5, rng);
    CHECK(translation_length(to_matrix(conj(g, w))) ==
          doctest::Approx(translation_length(to_matrix(w))).epsilon(1e-9));
  }
}

TEST_CASE("boundary action fixes the right cusps") {
  BoundaryPt inf{1, 0}, zero{0, 1}, one{1, 1};
  CHECK(boundary_apply(to_matrix(Word::parse("a")), inf) == inf);
  CHECK(boundary_apply(to_matrix(Word::parse("b")), zero) == zero);
  CHECK(boundary_apply(to_matrix(Word::parse("ab")), one) == one);
  // a: 0 -> 2 = 2/1.
  CHECK(boundary_apply(to_matrix(Word::parse("a")), zero) == BoundaryPt{2, 1});
  // b: inf -> 1/-2, normalized to -1/2.
  CHECK(boundary_apply(to_matrix(Word::parse("b")), inf) == BoundaryPt{-1, 2});
}

TEST_CASE("point-to-geodesic distance in closed form") {
  Geodesic axis;  // vertical through 0
  axis.vertical = true;
  axis.x0 = 0.0;
  CHECK(dist_to_geodesic(cplx(0, 3), axis) == 0.0);
  CHECK(dist_to_geodesic(cplx(1, 1), axis) ==
        doctest::Approx(std::asinh(1.0)).epsilon(1e-12));
  // Same distance via the explicit foot of the perpendicular.
  CHECK(dist_to_geodesic(cplx(1, 1), axis) ==
        doctest::Approx(hyp_dist(cplx(1, 1), cplx(0, std::sqrt(2.0)))).epsilon(1e-12));

  // Unit semicircle: i lies on it.
  Geodesic circ;
  circ.m = 0.0;
  circ.R = 1.0;
  CHECK(dist_to_geodesic(cplx(0, 1), circ) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dist_to_geodesic(cplx(0, 2), circ) ==
        doctest::Approx(hyp_dist(cplx(0, 2), cplx(0, 1))).epsilon(1e-12));

  // Geodesic::through recovers both shapes.
  Geodesic g1 = Geodesic::through(cplx(0, 1), cplx(0, 5));
  CHECK(g1.vertical);
  Geodesic g2 = Geodesic::through(cplx(-1, 1), cplx(1, 1));
  CHECK_FALSE(g2.vertical);
  CHECK(g2.m == doctest::Approx(0.0));
  CHECK(g2.R == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("segment distance clamps to the nearest endpoint") {
  cplx s1(0, 1), s2(0, 2);
  CHECK(dist_to_segment(cplx(0, 3), s1, s2) ==
        doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(dist_to_segment(cplx(0, 0.5), s1, s2) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // Foot of the perpendicular from 1 + i sqrt(2) lands at i sqrt(3), inside
  // the segment, so the distance is the plain line distance asinh(1/sqrt 2).
  CHECK(dist_to_segment(cplx(1, std::sqrt(2.0)), s1, s2) ==
        doctest::Approx(std::asinh(1.0 / std::sqrt(2.0))).epsilon(1e-9));
  // Degenerate segment falls back to point distance.
  CHECK(dist_to_segment(cplx(0, 2), s1, s1) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("segment sampling is an arclength parameterization") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    cplx s1 = random_point(rng), s2 = random_point(rng);
    if (std::abs(s1 - s2) < 1e-3) continue;
    double total = hyp_dist(s1, s2);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      cplx p = sample_segment(s1, s2, t);
      CHECK(hyp_dist(s1, p) == doctest::Approx(t * total).epsilon(1e-8));
      CHECK(dist_to_segment(p, s1, s2) < 1e-8);
    }
  }
}
