#pragma once

// Test-side numerical counterpart of the algebraic right action: lift the
// loop of a word through the first map of a correspondence, identify the
// landing fiber slot, close the image through the basis paths, and read the
// resulting loop.  The computation never consults the recursion tables, so
// agreement with the algebraic action is a genuine cross-check.  Uses
// doctest assertions internally; include from doctest binaries only.

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <corrx/biset.hpp>
#include <corrx/derive.hpp>

namespace dual {

struct NumericalAction {
  corrx::Word head;
  std::size_t slot = 0;
};

// Lift the loop of w starting at fiber slot `start`, identify the landing
// slot from the lift endpoint, and read the image loop closed up by the
// basis paths.
inline NumericalAction lift_and_read(const corrx::Correspondence& c,
                                     const corrx::DerivedRecursion& d,
                                     const corrx::Word& w,
                                     std::size_t start) {
  const corrx::PathPolyline loop =
      corrx::word_loop(d.reader, d.basepoint, w, d.samples_per_turn);
  const corrx::PathPolyline lift =
      corrx::lift_path(c.phi, loop, d.fiber[start]);
  const corrx::cplx e = lift.samples.back();
  NumericalAction out;
  double best = 1e300;
  for (std::size_t k = 0; k < d.fiber.size(); ++k) {
    const double dk = std::abs(e - d.fiber[k]);
    if (dk < best) {
      best = dk;
      out.slot = k;
    }
  }
  REQUIRE(best < 1e-6);
  std::vector<corrx::cplx> samples = d.basis_paths[start];
  for (const corrx::cplx& z : lift.samples) {
    const corrx::SpherePt r = c.rho.eval(corrx::SpherePt::at(z));
    REQUIRE_FALSE(r.inf);
    if (samples.empty() || samples.back() != r.z) samples.push_back(r.z);
  }
  const std::vector<corrx::cplx>& ret = d.basis_paths[out.slot];
  for (std::size_t t = ret.size(); t-- > 0;)
    if (samples.back() != ret[t]) samples.push_back(ret[t]);
  corrx::PathPolyline closed;
  closed.samples = std::move(samples);
  closed.closed = true;
  closed.basepoint = d.basepoint;
  out.head = d.reader.read_loop(closed);
  return out;
}

// Compare the algebraic and numerical actions on `words` random reduced
// words of length <= 9 from the given seed; returns the mismatch count
// while also asserting through doctest.
inline int dual_check(const corrx::Correspondence& c,
                      const corrx::DerivedRecursion& d, std::uint64_t seed,
                      int words) {
  std::mt19937_64 rng(seed);
  const std::size_t D = d.fiber.size();
  int mismatches = 0;
  for (int n = 0; n < words; ++n) {
    const std::size_t len = 1 + corrx::bounded_draw(rng, 8);
    const corrx::Word w = corrx::random_reduced_word(d.rec.rank, len, rng);
    const std::size_t start = corrx::bounded_draw(rng, D);
    CAPTURE(w.str());
    CAPTURE(start);
    const corrx::BisetElement alg =
        corrx::right_action(corrx::BisetElement{corrx::Word(), start}, w,
                            d.rec);
    const NumericalAction num = lift_and_read(c, d, w, start);
    CHECK(alg.index == num.slot);
    CHECK(alg.head == num.head);
    if (alg.index != num.slot || !(alg.head == num.head)) ++mismatches;
  }
  return mismatches;
}

}  // namespace dual
