#pragma once
// Simple closed curves on the four-punctured sphere and their pullback
// under a degree-D wreath recursion over the rank-3 free group.  Curves
// are indexed by slopes p/q; the three base slopes get fixed two-letter
// words and every other slope word is built by a Stern-Brocot descent
// through the two Dehn-twist automorphisms, which generate a free group,
// so the dictionary is independent of the descent path.  Pulling back a
// curve decomposes the slot permutation of its word into cycles: each
// cycle of length k through slot i contributes the component with head
// right_action((1, i), w^k).  Components are classified back to slopes
// against a table that deepens itself on demand; iteration of multicurve
// states is a plain function, so the orbit graph has one successor per
// node and the attractor is its set of eventual cycles.

#include <corrx/biset.hpp>
#include <corrx/correspondence.hpp>

#include <json.hpp>

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace corrx {

// ---------------------------------------------------------------------------
// Slopes.

struct Slope {
  long long p = 0;
  long long q = 1;

  // Normalized: gcd 1, q >= 0, the infinity slope is exactly (1, 0), and
  // zero is exactly (0, 1).
  static Slope of(long long p, long long q) {
    if (p == 0 && q == 0) throw error("Slope: 0/0");
    const long long g = std::gcd(p < 0 ? -p : p, q < 0 ? -q : q);
    p /= g;
    q /= g;
    if (q < 0) {
      p = -p;
      q = -q;
    }
    if (q == 0) p = 1;
    return Slope{p, q};
  }

  std::string str() const {
    return std::to_string(p) + "/" + std::to_string(q);
  }

  bool operator==(const Slope& o) const { return p == o.p && q == o.q; }
  bool operator<(const Slope& o) const {
    return p != o.p ? p < o.p : q < o.q;
  }
};

// ---------------------------------------------------------------------------
// Slope words: the dictionary between slopes and free-group classes.

namespace detail {

inline Word conj_by(const Word& t, const Word& w) {
  Word out = t;
  out *= w;
  out *= t.inverse();
  return out;
}

}  // namespace detail

// Full twist about the infinity-slope curve (class bc), direction +1/-1.
inline Endo twist_about_infinity(int direction) {
  if (direction != 1 && direction != -1)
    throw error("twist_about_infinity: direction must be +1 or -1");
  Word t = Word::parse("bc");
  if (direction < 0) t = t.inverse();
  return Endo({Word::parse("a"), detail::conj_by(t, Word::parse("b")),
               detail::conj_by(t, Word::parse("c"))});
}

// Full twist about the zero-slope curve (class ab), direction +1/-1.
inline Endo twist_about_zero(int direction) {
  if (direction != 1 && direction != -1)
    throw error("twist_about_zero: direction must be +1 or -1");
  Word t = Word::parse("ab");
  if (direction < 0) t = t.inverse();
  return Endo({detail::conj_by(t, Word::parse("a")),
               detail::conj_by(t, Word::parse("b")), Word::parse("c")});
}

namespace detail {

// Stern-Brocot descent.  Both twists conjugate by the enclosed
// peripheral pair in the same cyclic order, so they share a handedness:
// the twist about infinity realizes x -> x - 2 on slopes while the twist
// about zero realizes x -> x / (2x + 1); the inverses undo them.  (The
// incoherent pairings build off-tree words whose length grows
// exponentially along alternating descents.)  Each step shrinks
// max(|p|, |q|), reaching one of the three base slopes.
inline Word slope_word_impl(Slope s,
                            std::map<std::pair<long long, long long>, Word>*
                                memo) {
  if (memo) {
    const auto it = memo->find({s.p, s.q});
    if (it != memo->end()) return it->second;
  }
  Word out;
  if (s == Slope{0, 1}) {
    out = Word::parse("ab");
  } else if (s == Slope{1, 0}) {
    out = Word::parse("bc");
  } else if (s == Slope{1, 1}) {
    out = Word::parse("ac");
  } else {
    const long long ap = s.p < 0 ? -s.p : s.p;
    if (ap >= s.q) {
      const int dir = s.p > 0 ? -1 : 1;
      const Word inner =
          slope_word_impl(Slope::of(s.p + 2 * dir * s.q, s.q), memo);
      out = twist_about_infinity(dir)(inner);
    } else {
      const int dir = s.p > 0 ? 1 : -1;
      const Word inner =
          slope_word_impl(Slope::of(s.p, s.q - 2 * dir * s.p), memo);
      out = twist_about_zero(dir)(inner);
    }
  }
  if (memo) memo->emplace(std::pair{s.p, s.q}, out);
  return out;
}

}  // namespace detail

inline Word slope_word(Slope s) {
  return detail::slope_word_impl(s, nullptr);
}

// ---------------------------------------------------------------------------
// Curve classes.

struct CurveClass {
  ConjClass cls;  // inversion-minimized conjugacy class
  std::optional<Slope> slope;

  static CurveClass of(const Word& w) {
    return CurveClass{ConjClass::of(w, true), std::nullopt};
  }

  bool operator==(const CurveClass& o) const { return cls == o.cls; }
};

// Trivial or conjugate into a peripheral subgroup.
inline bool is_nonessential(const CurveClass& c, int rank = 3) {
  if (c.cls.trivial()) return true;
  return peripheral_class(c.cls.rep(), rank).has_value();
}

// ---------------------------------------------------------------------------
// Slope table: class string -> slope, deepened on demand.

class SlopeTable {
 public:
  explicit SlopeTable(long long bound) { deepen_to(bound); }

  long long bound() const { return bound_; }

  void deepen_to(long long b) {
    if (b <= bound_) return;
    const auto add = [this](Slope s) {
      const Word w = detail::slope_word_impl(s, &words_);
      by_class_.emplace(ConjClass::of(w, true).str(), s);
    };
    add(Slope{1, 0});
    for (long long q = 1; q <= b; ++q)
      for (long long p = -b; p <= b; ++p) {
        if (std::gcd(p < 0 ? -p : p, q) != 1) continue;
        if (q <= bound_ && (p < 0 ? -p : p) <= bound_) continue;
        add(Slope{p, q});
      }
    bound_ = b;
  }

  std::optional<Slope> find(const ConjClass& cls) const {
    const auto it = by_class_.find(cls.str());
    if (it == by_class_.end()) return std::nullopt;
    return it->second;
  }

 private:
  long long bound_ = 0;
  std::unordered_map<std::string, Slope> by_class_;
  std::map<std::pair<long long, long long>, Word> words_;
};

// ---------------------------------------------------------------------------
// Dynamical bisets and curve pullback.

struct DynamicalBiset {
  WreathRecursion rec;

  // Thurston-map consistency: along every slot cycle of every peripheral
  // word (the rank generators and the puncture at infinity), the cycle
  // product of cofactors must be trivial or peripheral.
  void validate() const {
    rec.validate();
    for (int puncture = 0; puncture <= rec.rank; ++puncture) {
      const Word w = peripheral_word(rec.rank, puncture);
      std::vector<bool> seen(rec.D, false);
      for (std::size_t i = 0; i < rec.D; ++i) {
        if (seen[i]) continue;
        std::size_t at = i;
        std::size_t len = 0;
        do {
          seen[at] = true;
          at = right_action(BisetElement{Word(), at}, w, rec).index;
          ++len;
        } while (at != i);
        const Word prod =
            right_action(BisetElement{Word(), i},
                         w.pow(static_cast<long long>(len)), rec)
                .head;
        if (!prod.empty() && !peripheral_class(prod, rec.rank))
          throw error(
              "DynamicalBiset: a peripheral cycle product is neither "
              "trivial nor peripheral");
      }
    }
  }
};

// Raw full preimage of a curve class: one component per cycle of the slot
// permutation of its word.  Cycle lengths always sum to D.
inline std::vector<CurveClass> pullback_curve(const DynamicalBiset& B,
                                              const CurveClass& c) {
  const Word& w = c.cls.rep();
  std::vector<CurveClass> out;
  std::vector<bool> seen(B.rec.D, false);
  for (std::size_t i = 0; i < B.rec.D; ++i) {
    if (seen[i]) continue;
    std::size_t at = i;
    std::size_t len = 0;
    do {
      seen[at] = true;
      at = right_action(BisetElement{Word(), at}, w, B.rec).index;
      ++len;
    } while (at != i);
    out.push_back(CurveClass::of(
        right_action(BisetElement{Word(), i},
                     w.pow(static_cast<long long>(len)), B.rec)
            .head));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification.

struct Classified {
  enum Kind { nonessential, recognized, unrecognized } kind = nonessential;
  std::optional<Slope> slope;
};

inline Classified classify(const CurveClass& c, const SlopeTable& table) {
  if (is_nonessential(c)) return {Classified::nonessential, std::nullopt};
  const std::optional<Slope> s = table.find(c.cls);
  if (s) return {Classified::recognized, s};
  return {Classified::unrecognized, std::nullopt};
}

// ---------------------------------------------------------------------------
// Multicurve states and their pullback.

struct MulticurveState {
  std::set<Slope> slopes;

  std::string str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const Slope& s : slopes) {
      if (!first) os << ", ";
      os << s.str();
      first = false;
    }
    os << "}";
    return os.str();
  }

  bool operator==(const MulticurveState& o) const {
    return slopes == o.slopes;
  }
};

struct PullbackResult {
  MulticurveState state;
  std::vector<CurveClass> unrecognized;  // flagged, never silently dropped
};

// One pullback step on a multicurve state: union of the classified
// essential preimage components of its slopes.  Unrecognized components
// deepen the table (doubling its bound up to the cap) before being
// flagged.
inline PullbackResult pullback_multicurve(const DynamicalBiset& B,
                                          const MulticurveState& m,
                                          SlopeTable& table,
                                          long long deepen_cap = 128) {
  PullbackResult out;
  for (const Slope& s : m.slopes) {
    const CurveClass curve = CurveClass::of(slope_word(s));
    for (const CurveClass& comp : pullback_curve(B, curve)) {
      Classified k = classify(comp, table);
      while (k.kind == Classified::unrecognized &&
             table.bound() < deepen_cap) {
        table.deepen_to(std::min(deepen_cap, 2 * table.bound()));
        k = classify(comp, table);
      }
      if (k.kind == Classified::recognized)
        out.state.slopes.insert(*k.slope);
      else if (k.kind == Classified::unrecognized)
        out.unrecognized.push_back(comp);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curve orbit graphs and the attractor.

struct CurveOrbit {
  std::vector<MulticurveState> nodes;
  std::vector<std::size_t> succ;  // exactly one successor per node
  bool closed = false;
  std::vector<std::size_t> attractor;           // sorted ids on cycles
  std::vector<std::size_t> steps_to_attractor;  // walk length to a cycle
  std::vector<std::string> unrecognized;        // flagged component classes
};

class curve_budget_error : public error {
 public:
  CurveOrbit partial;
  curve_budget_error(const std::string& what, CurveOrbit g)
      : error(what), partial(std::move(g)) {}
};

// Orbit closure of pullback_multicurve from every slope with
// max(|p|, |q|) <= seed_bound, followed by cycle detection.  The graph is
// functional, so the attractor is exactly the set of nodes on cycles.
inline CurveOrbit curve_attractor(const DynamicalBiset& B,
                                  long long seed_bound, SlopeTable& table,
                                  std::size_t max_nodes = std::size_t{1}
                                                          << 20,
                                  long long deepen_cap = 128) {
  B.validate();
  if (seed_bound < 0) throw error("curve_attractor: negative seed bound");
  if (max_nodes == 0) throw error("curve_attractor: max_nodes must be > 0");

  CurveOrbit g;
  std::unordered_map<std::string, std::size_t> ids;
  const auto intern = [&](const MulticurveState& st) {
    const std::string key = st.str();
    const auto it = ids.find(key);
    if (it != ids.end()) return std::pair<std::size_t, bool>{it->second,
                                                             false};
    const std::size_t id = g.nodes.size();
    ids.emplace(key, id);
    g.nodes.push_back(st);
    return std::pair<std::size_t, bool>{id, true};
  };

  std::vector<std::size_t> frontier;
  const auto seed = [&](const MulticurveState& st) {
    const auto [id, fresh] = intern(st);
    if (fresh) frontier.push_back(id);
  };
  seed(MulticurveState{{Slope{1, 0}}});
  for (long long q = 1; q <= seed_bound; ++q)
    for (long long p = -seed_bound; p <= seed_bound; ++p)
      if (std::gcd(p < 0 ? -p : p, q) == 1)
        seed(MulticurveState{{Slope{p, q}}});

  g.succ.assign(g.nodes.size(), 0);
  while (!frontier.empty()) {
    if (g.nodes.size() > max_nodes)
      throw curve_budget_error("curve_attractor: node budget exceeded",
                               std::move(g));
    std::vector<std::size_t> next;
    for (const std::size_t v : frontier) {
      PullbackResult r = pullback_multicurve(B, g.nodes[v], table,
                                             deepen_cap);
      for (const CurveClass& c : r.unrecognized)
        g.unrecognized.push_back(c.cls.str());
      const auto [to, fresh] = intern(r.state);
      if (g.succ.size() < g.nodes.size()) g.succ.resize(g.nodes.size(), 0);
      g.succ[v] = to;
      if (fresh) next.push_back(to);
    }
    frontier = std::move(next);
  }
  g.closed = true;

  // Cycle detection in a functional graph: color the walk from every node.
  const std::size_t n = g.nodes.size();
  std::vector<int> color(n, 0);  // 0 new, 1 on current walk, 2 resolved
  std::vector<bool> cyclic(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (color[s] != 0) continue;
    std::vector<std::size_t> walk;
    std::size_t at = s;
    while (color[at] == 0) {
      color[at] = 1;
      walk.push_back(at);
      at = g.succ[at];
    }
    if (color[at] == 1) {  // closed a new cycle: mark it
      std::size_t k = walk.size();
      while (k > 0 && walk[k - 1] != at) --k;
      for (std::size_t i = k > 0 ? k - 1 : 0; i < walk.size(); ++i)
        cyclic[walk[i]] = true;
    }
    for (const std::size_t v : walk) color[v] = 2;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (cyclic[v]) g.attractor.push_back(v);

  g.steps_to_attractor.assign(n, 0);
  std::vector<int> have(n, 0);
  for (std::size_t v = 0; v < n; ++v) have[v] = cyclic[v] ? 1 : 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (have[s]) continue;
    std::vector<std::size_t> walk;
    std::size_t at = s;
    while (!have[at]) {
      walk.push_back(at);
      at = g.succ[at];
    }
    std::size_t d = g.steps_to_attractor[at];
    for (std::size_t i = walk.size(); i-- > 0;) {
      ++d;
      g.steps_to_attractor[walk[i]] = d;
      have[walk[i]] = 1;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Exports.

inline std::string curves_to_dot(const CurveOrbit& g) {
  std::vector<bool> in_att(g.nodes.size(), false);
  for (const std::size_t v : g.attractor) in_att[v] = true;
  std::ostringstream os;
  os << "digraph curves {\n  rankdir=LR;\n";
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    os << "  n" << v << " [label=\"" << g.nodes[v].str() << "\""
       << (in_att[v] ? ", shape=doublecircle" : "") << "];\n";
  for (std::size_t v = 0; v < g.succ.size() && v < g.nodes.size(); ++v)
    os << "  n" << v << " -> n" << g.succ[v] << ";\n";
  os << "}\n";
  return os.str();
}

inline nlohmann::ordered_json curves_to_json(const CurveOrbit& g) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const MulticurveState& st : g.nodes) j["nodes"].push_back(st.str());
  j["edges"] = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < g.succ.size() && v < g.nodes.size(); ++v)
    j["edges"].push_back({{"from", v}, {"to", g.succ[v]}});
  j["closed"] = g.closed;
  j["attractor"] = g.attractor;
  j["steps_to_attractor"] = g.steps_to_attractor;
  j["unrecognized"] = g.unrecognized;
  return j;
}

// ---------------------------------------------------------------------------
// The dynamical plane of z^2 + i, rescaled by (1 + 2i) so the four
// postcritical punctures have distinct vertical cuts: the conjugated map
// is g(w) = (w^2 - 4 - 3i) / (1 + 2i) with punctures
// {-3 - i, -2 + i, 2 - i, infinity}.

inline Correspondence z2i_dynamical_plane() {
  const auto gq = [](long long re, long long im) {
    return GaussQ(Rat(re), Rat(im));
  };
  Correspondence c;
  c.name = "z2i-dynamical";
  c.phi = RationalMap::from_exact(
      QPoly({gq(-4, -3), gq(0, 0), gq(1, 0)}), QPoly({gq(1, 2)}));
  c.rho = RationalMap::from_exact(QPoly({gq(0, 0), gq(1, 0)}),
                                  QPoly({gq(1, 0)}));
  c.phi0 = c.phi;
  c.rho0 = c.rho;
  c.cusps_S = detail::cusp_set_from_vanishing(
      QPoly({gq(3, 1), gq(1, 0)}) * QPoly({gq(2, -1), gq(1, 0)}) *
          QPoly({gq(-2, 1), gq(1, 0)}),
      true);
  c.cusps_T = c.cusps_S;
  c.cusps_S0 = c.cusps_S;
  c.cusps_T0 = c.cusps_S;
  c.normalized_exact = true;
  return c;
}

}  // namespace corrx
