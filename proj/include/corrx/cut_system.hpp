#pragma once
// Cut systems on punctured spheres and the crossing-sequence word reader:
// closed loops avoiding the punctures are converted to freely reduced words
// in the peripheral generators by recording transversal crossings of a fixed
// system of cuts.
//
// Two cut geometries are provided.
//
//   * real_axis(): punctures 0, 1, infinity, cut along the real intervals
//     (-inf,0), (0,1), (1,inf).  Crossing (-inf,0) downward emits a;
//     crossing (1,inf) upward emits b; crossings of (0,1) are homotopically
//     silent, because the plane cut along the other two slits is already
//     simply connected.  A counterclockwise circle about 0 then reads a,
//     about 1 reads b, and the loop about infinity reads (ab)^-1.
//
//   * vertical_rays(ps): finite punctures ps (pairwise distinct real parts)
//     plus infinity, cut along the downward vertical ray below each finite
//     puncture.  Crossing the ray of the j-th puncture (punctures ordered by
//     ascending real part) left-to-right emits the j-th generator, so a
//     small counterclockwise circle about a puncture reads its generator and
//     the loop about infinity reads the inverse of the ascending product.
//
// Loop construction helpers build, for any basepoint off the cuts, a
// polyline loop reading exactly a requested generator letter (approach the
// puncture without crossing any cut, circle it once, return the same way),
// and concatenations realizing arbitrary words.

#include <corrx/common.hpp>
#include <corrx/path_lift.hpp>
#include <corrx/words.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace corrx {

class WordReader {
 public:
  static WordReader real_axis() {
    WordReader rd;
    rd.rays_ = false;
    rd.punctures_ = {cplx(0.0, 0.0), cplx(1.0, 0.0)};
    return rd;
  }

  static WordReader vertical_rays(std::vector<cplx> finite_punctures) {
    if (finite_punctures.size() < 2)
      throw error("WordReader: need at least two finite punctures");
    std::sort(finite_punctures.begin(), finite_punctures.end(),
              [](cplx a, cplx b) { return a.real() < b.real(); });
    for (std::size_t j = 0; j + 1 < finite_punctures.size(); ++j)
      if (finite_punctures[j + 1].real() - finite_punctures[j].real() < 1e-6)
        throw error(
            "WordReader: puncture real parts coincide; the ray cuts are "
            "ambiguous");
    WordReader rd;
    rd.rays_ = true;
    rd.punctures_ = std::move(finite_punctures);
    return rd;
  }

  int rank() const { return static_cast<int>(punctures_.size()); }
  bool uses_rays() const { return rays_; }
  const std::vector<cplx>& punctures() const { return punctures_; }

  // Crossing word of a closed loop.  Errors: loop not closed; sample at a
  // puncture, on a cut, or non-finite; crossing within tolerance of a
  // puncture.
  Word read_loop(const PathPolyline& loop, double tol = 1e-9) const {
    const std::vector<cplx>& s = loop.samples;
    if (!loop.closed || s.size() < 2 ||
        std::abs(s.front() - s.back()) > tol)
      throw error("read_loop: loop is not closed");
    for (cplx z : s) guard_sample(z, tol);
    Word w;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      if (rays_)
        cross_rays(s[k], s[k + 1], tol, w);
      else
        cross_axis(s[k], s[k + 1], tol, w);
    }
    return w;
  }

 private:
  void guard_sample(cplx z, double tol) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw error("read_loop: non-finite sample");
    for (cplx p : punctures_)
      if (std::abs(z - p) < 10.0 * tol)
        throw error("read_loop: sample at a puncture");
    if (!rays_) {
      if (std::abs(z.imag()) < tol)
        throw error("read_loop: sample lies on a cut");
    } else {
      for (cplx p : punctures_)
        if (std::abs(z.real() - p.real()) < tol && z.imag() < p.imag() + tol)
          throw error("read_loop: sample lies on a cut");
    }
  }

  void cross_axis(cplx z1, cplx z2, double tol, Word& w) const {
    if ((z1.imag() > 0.0) == (z2.imag() > 0.0)) return;
    const double t = z1.imag() / (z1.imag() - z2.imag());
    const double x = z1.real() + t * (z2.real() - z1.real());
    if (std::abs(x) < tol || std::abs(x - 1.0) < tol)
      throw error("read_loop: crossing within tolerance of a puncture");
    const bool down = z1.imag() > 0.0;
    if (x < 0.0)
      w.push(down ? Letter(1) : Letter(-1));
    else if (x > 1.0)
      w.push(down ? Letter(-2) : Letter(2));
    // 0 < x < 1: silent cut.
  }

  void cross_rays(cplx z1, cplx z2, double tol, Word& w) const {
    std::vector<std::pair<double, Letter>> hits;
    for (std::size_t j = 0; j < punctures_.size(); ++j) {
      const double d1 = z1.real() - punctures_[j].real();
      const double d2 = z2.real() - punctures_[j].real();
      if (!(d1 * d2 < 0.0)) continue;
      const double t = d1 / (d1 - d2);
      const double y = z1.imag() + t * (z2.imag() - z1.imag());
      if (y > punctures_[j].imag() + tol) continue;  // above the puncture
      if (y > punctures_[j].imag() - tol)
        throw error("read_loop: crossing within tolerance of a puncture");
      const Letter base = static_cast<Letter>(j + 1);
      hits.emplace_back(t, d1 < 0.0 ? base : inv(base));
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, l] : hits) w.push(l);
  }

  bool rays_ = false;
  std::vector<cplx> punctures_;
};

namespace detail {

inline void append_line(std::vector<cplx>& out, cplx from, cplx to, int n) {
  for (int k = 1; k <= n; ++k)
    out.push_back(from + (static_cast<double>(k) / n) * (to - from));
}

}  // namespace detail

// A loop based at `base` reading exactly the single letter l: approach the
// puncture without crossing any cut, circle it once, and return the same
// way.  `samples_per_turn` is forced odd so that no circle sample lands on a
// cardinal crossing point.
inline PathPolyline generator_loop(const WordReader& rd, cplx base, Letter l,
                                   int samples_per_turn = 65) {
  const int j = (l < 0 ? -l : l) - 1;
  if (l == 0 || j >= rd.rank())
    throw error("generator_loop: letter outside the reader's rank");
  if (samples_per_turn < 16) throw error("generator_loop: too few samples");
  if (samples_per_turn % 2 == 0) ++samples_per_turn;
  const std::vector<cplx>& ps = rd.punctures();
  const cplx p = ps[static_cast<std::size_t>(j)];

  double radius = 0.3;
  std::vector<cplx> approach{base};
  double entry_angle;
  constexpr double kPi = 3.14159265358979323846;

  if (!rd.uses_rays()) {
    if (std::abs(base.imag()) < 1e-6)
      throw error("generator_loop: basepoint too close to the cuts");
    // Straight approach inside one half-plane to the near pole of the
    // circle (the segment between two points of a half-plane stays in it).
    entry_angle = base.imag() > 0.0 ? kPi / 2 : -kPi / 2;
    detail::append_line(approach, base,
                        p + cplx(0.0, base.imag() > 0.0 ? radius : -radius),
                        16);
  } else {
    double max_im = base.imag();
    for (cplx q : ps) {
      max_im = std::max(max_im, q.imag());
      if (std::abs(base.real() - q.real()) < 1e-6)
        throw error("generator_loop: basepoint on a cut line");
    }
    for (std::size_t k = 0; k < ps.size(); ++k)
      if (k != static_cast<std::size_t>(j))
        radius = std::min(radius,
                          0.45 * std::abs(p.real() - ps[k].real()));
    // Staircase above every puncture, then straight down to the circle top.
    const double lid = max_im + 1.0;
    entry_angle = kPi / 2;
    detail::append_line(approach, base, cplx(base.real(), lid), 8);
    detail::append_line(approach, cplx(base.real(), lid),
                        cplx(p.real(), lid), 8);
    detail::append_line(approach, cplx(p.real(), lid),
                        p + cplx(0.0, radius), 8);
  }

  PathPolyline loop;
  loop.samples = approach;
  const double dir = l > 0 ? 1.0 : -1.0;
  for (int k = 1; k <= samples_per_turn; ++k) {
    const double th = entry_angle + dir * 2.0 * kPi * k / samples_per_turn;
    loop.samples.push_back(p + radius * cplx(std::cos(th), std::sin(th)));
  }
  loop.samples.back() = approach.back();  // exact closure of the circle
  for (std::size_t k = approach.size() - 1; k-- > 0;)
    loop.samples.push_back(approach[k]);
  loop.closed = true;
  loop.basepoint = base;
  return loop;
}

// Concatenation of generator loops realizing the word w at `base`.
inline PathPolyline word_loop(const WordReader& rd, cplx base, const Word& w,
                              int samples_per_turn = 65) {
  PathPolyline out;
  out.samples.push_back(base);
  for (Letter l : w.letters()) {
    const PathPolyline g = generator_loop(rd, base, l, samples_per_turn);
    out.samples.insert(out.samples.end(), g.samples.begin() + 1,
                       g.samples.end());
  }
  if (out.samples.size() == 1) out.samples.push_back(base);
  out.closed = true;
  out.basepoint = base;
  return out;
}

}  // namespace corrx
