#pragma once
// Numerical derivation of a wreath recursion from a correspondence.  The
// basepoint is an interior coincidence value (or supplied); the basis is
// the covering fiber over it.  Each slot is joined to the basepoint by a
// path through the second map's image of its fiber point, every generator
// loop is lifted through the covering from every slot, and the closed-up
// image loops are read back as words over the target's cut system.

#include <corrx/biset.hpp>
#include <corrx/correspondence.hpp>
#include <corrx/cut_system.hpp>
#include <corrx/path_lift.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace corrx {

struct DerivedRecursion {
  WreathRecursion rec;
  ConnectorSet connectors;  // trivial connector per slot, direction marked
  WordReader reader = WordReader::real_axis();
  cplx basepoint{0.0, 0.0};
  std::vector<cplx> fiber;                     // covering fiber, slot order
  std::vector<std::vector<cplx>> basis_paths;  // basepoint -> rho(fiber[k])
  std::optional<std::size_t> fixed_slot;       // slot of the coincidence point
  int samples_per_turn = 65;                   // density that succeeded
};

namespace detail {

// Cut system for the normalized target: axis cuts when the punctures are
// the standard {0, 1, infinity}, downward rays otherwise.
inline WordReader reader_for(const Correspondence& c) {
  if (!c.cusps_S.has_infinity)
    throw error("derive: the target punctures must include infinity");
  std::vector<cplx> finite;
  for (const SpherePt& p : c.cusps_S.points)
    if (!p.inf) finite.push_back(p.z);
  if (finite.size() == 2) {
    const double a = std::min(std::abs(finite[0]), std::abs(finite[1]));
    const double b =
        std::min(std::abs(finite[0] - 1.0), std::abs(finite[1] - 1.0));
    if (a < 1e-9 && b < 1e-9) return WordReader::real_axis();
  }
  return WordReader::vertical_rays(finite);
}

// Deterministic basepoint: the interior coincidence value farthest from
// the real axis, preferring the upper half plane.
inline cplx pick_basepoint(const Correspondence& c) {
  const auto key = [](cplx z) {
    return std::tuple<int, double, double>(z.imag() > 0.0 ? 0 : 1,
                                           -std::abs(z.imag()), z.real());
  };
  std::optional<cplx> best;
  for (const FixedPoint& fp : fixed_points(c)) {
    if (fp.ideal || fp.s.inf) continue;
    if (std::abs(fp.s.z.imag()) < 0.05) continue;
    if (!best || key(fp.s.z) < key(*best)) best = fp.s.z;
  }
  if (!best)
    throw error(
        "derive: no interior coincidence value clear of the real axis; "
        "supply a basepoint");
  return *best;
}

inline void check_base(const WordReader& rd, cplx base) {
  for (cplx p : rd.punctures())
    if (std::abs(base - p) < 1e-3)
      throw error("derive: basepoint too close to a puncture");
  if (!rd.uses_rays()) {
    if (std::abs(base.imag()) < 1e-6)
      throw error("derive: basepoint must stay off the real axis");
  } else {
    for (cplx p : rd.punctures())
      if (std::abs(base.real() - p.real()) < 1e-6)
        throw error("derive: basepoint must stay off the cut rays");
  }
}

inline double seg_dist(cplx a, cplx b, cplx p) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// Straight path with a detour waypoint beside every puncture the segment
// approaches within 0.05.  Waypoints keep clear of all punctures and, for
// ray cuts, of every cut line, so the read of the composite loop cannot
// stumble over its own vertices.
inline std::vector<cplx> basis_path(const WordReader& rd, cplx from,
                                    cplx to) {
  std::vector<cplx> path{from};
  const double len = std::abs(to - from);
  if (len < 1e-12) return path;  // constant path
  const cplx u = (to - from) / len;
  const cplx turn(0.0, 1.0);
  const cplx half(std::sqrt(0.5), std::sqrt(0.5));
  struct Detour {
    double t;
    cplx at;
  };
  std::vector<Detour> ds;
  for (cplx p : rd.punctures()) {
    if (seg_dist(from, to, p) >= 0.05) continue;
    const double t =
        std::clamp(((p - from) * std::conj(to - from)).real() / (len * len),
                   0.0, 1.0);
    bool placed = false;
    for (cplx cand : {p + 0.1 * turn * u, p - 0.1 * turn * u,
                      p + 0.1 * half * u, p - 0.1 * half * u}) {
      bool ok = true;
      for (cplx q : rd.punctures()) {
        if (std::abs(cand - q) < 0.02) ok = false;
        if (rd.uses_rays() && std::abs(cand.real() - q.real()) < 1e-3)
          ok = false;
      }
      if (ok) {
        ds.push_back({t, cand});
        placed = true;
        break;
      }
    }
    if (!placed)
      throw error("derive: no clear detour around a puncture on a basis "
                  "path");
  }
  std::sort(ds.begin(), ds.end(),
            [](const Detour& a, const Detour& b) { return a.t < b.t; });
  for (const Detour& d : ds) path.push_back(d.at);
  path.push_back(to);
  return path;
}

inline DerivedRecursion derive_attempt(const Correspondence& c, cplx base,
                                       bool from_coincidence, int spt) {
  DerivedRecursion out;
  out.reader = reader_for(c);
  check_base(out.reader, base);
  out.basepoint = base;
  out.samples_per_turn = spt;
  const int rank = out.reader.rank();

  // Covering fiber over the basepoint, slots in lexicographic order.
  for (const auto& [q, mult] : c.phi.preimages(SpherePt::at(base))) {
    if (q.inf)
      throw error("derive: the fiber contains infinity; move the basepoint");
    if (mult != 1)
      throw error(
          "derive: the basepoint is a critical value of the covering");
    out.fiber.push_back(q.z);
  }
  std::sort(out.fiber.begin(), out.fiber.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  const std::size_t D = out.fiber.size();
  if (D < 1) throw error("derive: empty fiber");

  // Images of the fiber under the second map, and the basis paths.
  std::vector<cplx> rimg(D);
  for (std::size_t k = 0; k < D; ++k) {
    const SpherePt r = c.rho.eval(SpherePt::at(out.fiber[k]));
    if (r.inf)
      throw error(
          "derive: a fiber point maps to infinity; move the basepoint");
    rimg[k] = r.z;
  }
  if (from_coincidence) {
    for (std::size_t k = 0; k < D; ++k)
      if (std::abs(rimg[k] - base) < 1e-6) out.fixed_slot = k;
    if (!out.fixed_slot)
      throw error("derive: coincidence point missing from its own fiber");
  }
  for (std::size_t k = 0; k < D; ++k) {
    const bool constant = out.fixed_slot && *out.fixed_slot == k;
    out.basis_paths.push_back(
        basis_path(out.reader, base, constant ? base : rimg[k]));
  }

  double min_gap = 1e300;
  for (std::size_t a = 0; a < D; ++a)
    for (std::size_t b = a + 1; b < D; ++b)
      min_gap = std::min(min_gap, std::abs(out.fiber[a] - out.fiber[b]));

  const auto rho_image = [&](cplx z) {
    const SpherePt r = c.rho.eval(SpherePt::at(z));
    if (r.inf)
      throw error("derive: a lifted path runs through a pole of the second "
                  "map");
    return r.z;
  };

  WreathRecursion rec;
  rec.rank = rank;
  rec.D = D;
  rec.sigma.assign(static_cast<std::size_t>(rank), {});
  rec.cof.assign(static_cast<std::size_t>(rank), {});
  for (int l = 1; l <= rank; ++l) {
    const PathPolyline loop =
        generator_loop(out.reader, base, static_cast<Letter>(l), spt);
    std::vector<PathPolyline> lifts(D);
    std::vector<std::size_t> sig(D);
    for (std::size_t k = 0; k < D; ++k) {
      lifts[k] = lift_path(c.phi, loop, out.fiber[k]);
      const cplx e = lifts[k].samples.back();
      std::size_t jbest = 0;
      double d0 = 1e300, d1 = 1e300;
      for (std::size_t j = 0; j < D; ++j) {
        const double dj = std::abs(e - out.fiber[j]);
        if (dj < d0) {
          d1 = d0;
          d0 = dj;
          jbest = j;
        } else {
          d1 = std::min(d1, dj);
        }
      }
      if (D > 1 && !(d0 <= 0.25 * min_gap && d1 >= 4.0 * d0))
        throw error(
            "derive: lift endpoint does not single out a fiber point");
      sig[k] = jbest;
    }
    std::vector<Word> cofs(D);
    for (std::size_t k = 0; k < D; ++k) {
      std::vector<cplx> samples = out.basis_paths[k];
      for (const cplx& z : lifts[k].samples) {
        const cplx w = rho_image(z);
        if (samples.empty() || samples.back() != w) samples.push_back(w);
      }
      const std::vector<cplx>& ret = out.basis_paths[sig[k]];
      for (std::size_t j = ret.size(); j-- > 0;)
        if (samples.back() != ret[j]) samples.push_back(ret[j]);
      PathPolyline closed;
      closed.samples = std::move(samples);
      closed.closed = true;
      closed.basepoint = base;
      cofs[k] = out.reader.read_loop(closed);
    }
    rec.sigma[static_cast<std::size_t>(l - 1)] = std::move(sig);
    rec.cof[static_cast<std::size_t>(l - 1)] = std::move(cofs);
  }
  rec.validate();
  out.rec = std::move(rec);

  for (std::size_t k = 0; k < D; ++k)
    out.connectors.connectors.push_back({Word(), k});
  out.connectors.direction = {Word(),
                              out.fixed_slot ? *out.fixed_slot : 0};
  out.connectors.validate(out.rec);
  return out;
}

}  // namespace detail

// Derive the recursion, retrying at doubled loop density when a read or a
// lift fails (samples landing on cuts or punctures move when the density
// changes).  Without a basepoint, an interior coincidence value is used
// and its slot becomes the direction; with one, the direction is slot 0.
inline DerivedRecursion derive_wreath_recursion(
    const Correspondence& c, std::optional<cplx> basepoint = {},
    int samples_per_turn = 65) {
  const bool from_coincidence = !basepoint.has_value();
  const cplx base =
      from_coincidence ? detail::pick_basepoint(c) : *basepoint;
  int spt = samples_per_turn;
  std::string last;
  for (int attempt = 0; attempt < 3; ++attempt) {
    try {
      return detail::derive_attempt(c, base, from_coincidence, spt);
    } catch (const error& e) {
      last = e.what();
      spt = 2 * spt + 1;
    }
  }
  throw error("derive: failed at three loop densities; last error: " + last);
}

}  // namespace corrx
