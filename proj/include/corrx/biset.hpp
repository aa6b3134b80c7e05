#pragma once
// Wreath recursions and the right action they induce on a left-free biset
// with a distinguished basis.  A connector set closes lifted loops back to
// the basepoint; iterating "act on the direction, close with a matching
// connector" drives every group element through a multivalued self-map
// whose orbit graph we explore breadth-first with memoization.  The
// attractor is the union of the cyclic strongly connected components, and
// contraction estimates are fitted from norm traces along rays.

#include <corrx/common.hpp>
#include <corrx/hyperbolic.hpp>
#include <corrx/words.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <exception>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

namespace corrx {

// ---------------------------------------------------------------------------
// Wreath recursion: for each generator, a permutation of the basis slots and
// one cofactor word per slot.  Images of inverse letters are derived
// formally, so the action extends to arbitrary reduced words.

struct WreathRecursion {
  int rank = 0;                                 // generators a, b, ...
  std::size_t D = 0;                            // basis size
  std::vector<std::vector<std::size_t>> sigma;  // [gen-1][slot] -> slot
  std::vector<std::vector<Word>> cof;           // [gen-1][slot] -> word

  void validate() const {
    if (rank < 1) throw error("WreathRecursion: rank must be positive");
    if (D < 1) throw error("WreathRecursion: basis must be nonempty");
    if (sigma.size() != static_cast<std::size_t>(rank) ||
        cof.size() != static_cast<std::size_t>(rank))
      throw error("WreathRecursion: need one slot map and one cofactor list "
                  "per generator");
    for (int g = 0; g < rank; ++g) {
      if (sigma[g].size() != D || cof[g].size() != D)
        throw error("WreathRecursion: slot data of generator " +
                    std::to_string(g + 1) + " does not match basis size");
      std::vector<bool> seen(D, false);
      for (std::size_t s : sigma[g]) {
        if (s >= D || seen[s])
          throw error("WreathRecursion: slot map of generator " +
                      std::to_string(g + 1) + " is not a permutation");
        seen[s] = true;
      }
      for (const Word& w : cof[g])
        if (w.max_rank() > rank)
          throw error("WreathRecursion: cofactor uses a letter outside the "
                      "group");
    }
  }

  // Slot image of a signed letter; negative letters use the inverse
  // permutation.
  std::size_t sigma_at(Letter l, std::size_t slot) const {
    if (l == 0 || (l < 0 ? -l : l) > rank)
      throw error("WreathRecursion: letter out of range");
    if (slot >= D) throw error("WreathRecursion: slot out of range");
    if (l > 0) return sigma[static_cast<std::size_t>(l) - 1][slot];
    const auto& fwd = sigma[static_cast<std::size_t>(-l) - 1];
    for (std::size_t j = 0; j < D; ++j)
      if (fwd[j] == slot) return j;
    throw error("WreathRecursion: slot map is not a permutation");
  }

  // Cofactor of a signed letter at a slot; for an inverse letter this is
  // the inverted cofactor read at the preimage slot, which makes
  // letter-then-inverse-letter act as the identity on every slot.
  Word cof_at(Letter l, std::size_t slot) const {
    if (l == 0 || (l < 0 ? -l : l) > rank)
      throw error("WreathRecursion: letter out of range");
    if (slot >= D) throw error("WreathRecursion: slot out of range");
    if (l > 0) return cof[static_cast<std::size_t>(l) - 1][slot];
    const std::size_t j = sigma_at(l, slot);
    return cof[static_cast<std::size_t>(-l) - 1][j].inverse();
  }
};

// One element of the left-free biset: a group word times a basis slot.
struct BisetElement {
  Word head;
  std::size_t index = 0;  // 0-based basis slot

  bool operator==(const BisetElement& o) const {
    return index == o.index && head == o.head;
  }
};

// Right action of a reduced word: letters multiply cofactors onto the head
// from the right while the slot moves through the permutations.
inline BisetElement right_action(BisetElement b, const Word& w,
                                 const WreathRecursion& rec) {
  for (Letter l : w.letters()) {
    b.head *= rec.cof_at(l, b.index);
    b.index = rec.sigma_at(l, b.index);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Connector set: elements used to close lifted loops, plus the direction the
// iteration pushes along.  Every slot must be reachable so each step has at
// least one closure.

struct ConnectorSet {
  std::vector<BisetElement> connectors;
  BisetElement direction;

  void validate(const WreathRecursion& rec) const {
    if (connectors.empty()) throw error("ConnectorSet: no connectors");
    std::vector<bool> seen(rec.D, false);
    for (const BisetElement& x : connectors) {
      if (x.index >= rec.D) throw error("ConnectorSet: connector slot out of range");
      seen[x.index] = true;
    }
    for (std::size_t s = 0; s < rec.D; ++s)
      if (!seen[s])
        throw error("ConnectorSet: slot " + std::to_string(s) +
                    " has no connector");
    if (direction.index >= rec.D)
      throw error("ConnectorSet: direction slot out of range");
  }
};

// One iteration step: act on the direction by g, then close with every
// connector sitting on the landing slot.  Output order follows connector
// ids, so the branch count equals the multiplicity of the landing slot.
inline std::vector<std::pair<Word, std::size_t>> xray_step(
    const Word& g, const ConnectorSet& X, const WreathRecursion& rec) {
  const BisetElement b = right_action(X.direction, g, rec);
  std::vector<std::pair<Word, std::size_t>> out;
  for (std::size_t cid = 0; cid < X.connectors.size(); ++cid) {
    const BisetElement& x = X.connectors[cid];
    if (x.index != b.index) continue;
    out.emplace_back(b.head * x.head.inverse(), cid);
  }
  if (out.empty())
    throw error("xray_step: no connector on slot " + std::to_string(b.index));
  return out;
}

// ---------------------------------------------------------------------------
// Orbit graph: nodes are reduced words in discovery order; each edge records
// the connector that produced it.  attractor() fills the last two fields.

struct OrbitGraph {
  std::vector<Word> nodes;
  // Per node, (connector id, target node) in connector-id order.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges;
  bool closed = false;                          // no unexpanded frontier
  std::vector<std::size_t> attractor;           // sorted node ids
  std::vector<std::size_t> steps_to_attractor;  // worst-case entry time
};

class budget_error : public error {
 public:
  OrbitGraph partial;
  budget_error(const std::string& what, OrbitGraph g)
      : error(what), partial(std::move(g)) {}
};

struct ExploreLimits {
  std::size_t max_nodes = std::size_t{1} << 20;
  std::size_t max_depth = std::size_t{1} << 20;
  int workers = 1;
};

// Breadth-first memoized closure of the iteration from the given seeds.
// Deterministic: nodes are interned in frontier order regardless of the
// worker count, because workers only evaluate steps and the merge is
// sequential.
inline OrbitGraph explore(const std::vector<Word>& seeds,
                          const ConnectorSet& X, const WreathRecursion& rec,
                          const ExploreLimits& lim = {}) {
  rec.validate();
  X.validate(rec);
  if (lim.max_nodes == 0 || lim.max_depth == 0)
    throw error("explore: limits must be positive");
  if (lim.workers < 1) throw error("explore: workers must be >= 1");
  if (seeds.empty()) throw error("explore: no seeds");

  OrbitGraph g;
  std::unordered_map<std::string, std::size_t> ids;
  const auto intern = [&](const Word& w) {
    std::string key = w.str();
    const auto it = ids.find(key);
    if (it != ids.end()) return std::pair<std::size_t, bool>{it->second, false};
    const std::size_t id = g.nodes.size();
    ids.emplace(std::move(key), id);
    g.nodes.push_back(w);
    g.edges.emplace_back();
    return std::pair<std::size_t, bool>{id, true};
  };

  std::vector<std::size_t> frontier;
  for (const Word& s : seeds) {
    const auto [id, fresh] = intern(s);
    if (fresh) frontier.push_back(id);
  }
  if (g.nodes.size() > lim.max_nodes)
    throw budget_error("explore: node budget exceeded while seeding",
                       std::move(g));

  using Branches = std::vector<std::pair<Word, std::size_t>>;
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    if (depth >= lim.max_depth)
      throw budget_error("explore: depth budget exceeded at depth " +
                             std::to_string(depth),
                         std::move(g));

    std::vector<Branches> results(frontier.size());
    const std::size_t nw =
        std::min<std::size_t>(static_cast<std::size_t>(lim.workers),
                              frontier.size());
    if (nw <= 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i)
        results[i] = xray_step(g.nodes[frontier[i]], X, rec);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errs(nw);
      const std::size_t chunk = (frontier.size() + nw - 1) / nw;
      for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(frontier.size(), lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
          try {
            for (std::size_t i = lo; i < hi; ++i)
              results[i] = xray_step(g.nodes[frontier[i]], X, rec);
          } catch (...) {
            errs[w] = std::current_exception();
          }
        });
      }
      for (std::thread& t : pool) t.join();
      for (const std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (const auto& [word, cid] : results[i]) {
        const auto [id, fresh] = intern(word);
        g.edges[frontier[i]].emplace_back(cid, id);
        if (fresh) next.push_back(id);
        if (g.nodes.size() > lim.max_nodes)
          throw budget_error("explore: node budget exceeded (" +
                                 std::to_string(g.nodes.size()) + " nodes)",
                             std::move(g));
      }
    }
    frontier = std::move(next);
  }
  g.closed = true;
  return g;
}

// ---------------------------------------------------------------------------
// Attractor: the union of the cyclic strongly connected components (size at
// least two, or a single node with a self-loop).  Also records, per node,
// the longest possible entry time into the attractor; outside the cyclic
// cores the graph is acyclic, so the maxima are finite.

inline std::vector<Word> attractor(OrbitGraph& g) {
  if (!g.closed) throw error("attractor: graph is not closed");
  const std::size_t n = g.nodes.size();
  for (std::size_t v = 0; v < n; ++v)
    if (g.edges[v].empty())
      throw error("attractor: node without outgoing edge");

  // Iterative Tarjan.
  std::vector<std::size_t> comp(n, SIZE_MAX), low(n, 0), order(n, SIZE_MAX);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, ncomp = 0;
  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != SIZE_MAX) continue;
    std::vector<Frame> call{{root, 0}};
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < g.edges[f.v].size()) {
        const std::size_t to = g.edges[f.v][f.edge++].second;
        if (order[to] == SIZE_MAX) {
          order[to] = low[to] = counter++;
          stack.push_back(to);
          on_stack[to] = true;
          call.push_back({to, 0});
        } else if (on_stack[to]) {
          low[f.v] = std::min(low[f.v], order[to]);
        }
      } else {
        if (low[f.v] == order[f.v]) {
          while (true) {
            const std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
            if (w == f.v) break;
          }
          ++ncomp;
        }
        const std::size_t child = f.v;
        call.pop_back();
        if (!call.empty())
          low[call.back().v] = std::min(low[call.back().v], low[child]);
      }
    }
  }

  std::vector<std::size_t> comp_size(ncomp, 0);
  for (std::size_t v = 0; v < n; ++v) ++comp_size[comp[v]];
  std::vector<bool> cyclic(ncomp, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (comp_size[comp[v]] > 1) {
      cyclic[comp[v]] = true;
      continue;
    }
    for (const auto& [cid, to] : g.edges[v])
      if (to == v) cyclic[comp[v]] = true;
  }

  g.attractor.clear();
  std::vector<bool> in_att(n, false);
  for (std::size_t v = 0; v < n; ++v)
    if (cyclic[comp[v]]) {
      g.attractor.push_back(v);
      in_att[v] = true;
    }

  // Worst-case entry time: zero inside, 1 + max over successors outside.
  // Nodes outside the cyclic cores span no cycle, so memoized descent
  // terminates.
  g.steps_to_attractor.assign(n, 0);
  std::vector<char> state(n, 0);  // 0 new, 1 open, 2 done
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root] == 2 || in_att[root]) {
      state[root] = 2;
      continue;
    }
    std::vector<std::size_t> work{root};
    while (!work.empty()) {
      const std::size_t v = work.back();
      if (in_att[v] || state[v] == 2) {
        state[v] = 2;
        work.pop_back();
        continue;
      }
      if (state[v] == 0) {
        state[v] = 1;
        bool ready = true;
        for (const auto& [cid, to] : g.edges[v])
          if (!in_att[to] && state[to] != 2) {
            if (state[to] == 1)
              throw error("attractor: cycle outside the cyclic cores");
            work.push_back(to);
            ready = false;
          }
        if (!ready) continue;
      }
      std::size_t best = 0;
      for (const auto& [cid, to] : g.edges[v])
        best = std::max(best, g.steps_to_attractor[to]);
      g.steps_to_attractor[v] = 1 + best;
      state[v] = 2;
      work.pop_back();
    }
  }

  std::vector<Word> words;
  words.reserve(g.attractor.size());
  for (std::size_t v : g.attractor) words.push_back(g.nodes[v]);
  return words;
}

// Canonical ray from a node: follow the first branch until the attractor is
// entered (the entry node is included).  Requires attractor() to have run.
inline std::vector<Word> ray_from(const OrbitGraph& g, std::size_t start) {
  if (start >= g.nodes.size()) throw error("ray_from: node out of range");
  if (g.steps_to_attractor.size() != g.nodes.size())
    throw error("ray_from: attractor not computed");
  std::vector<bool> in_att(g.nodes.size(), false);
  for (std::size_t v : g.attractor) in_att[v] = true;
  std::vector<Word> ray;
  std::size_t at = start;
  for (std::size_t guard = 0; guard <= g.nodes.size(); ++guard) {
    ray.push_back(g.nodes[at]);
    if (in_att[at]) return ray;
    at = g.edges[at][0].second;
  }
  throw error("ray_from: walk failed to reach the attractor");
}

// ---------------------------------------------------------------------------
// Norm traces along rays and fitted contraction constants.

inline std::vector<double> norm_trace(const std::vector<Word>& ray,
                                      cplx basepoint = cplx(0.0, 1.0)) {
  std::vector<double> ns;
  ns.reserve(ray.size());
  for (const Word& w : ray) ns.push_back(norm_at(w, basepoint));
  return ns;
}

struct ContractionReport {
  double kappa = 0.0;    // plateau: largest final norm over the traces
  std::size_t N = 1;     // block length: most steps any trace takes
  double epsilon = 0.0;  // fitted drop per block above the plateau
  double xi = 0.0;       // largest single-step increment (may be negative)
  bool envelope_ok = false;
  std::vector<std::vector<double>> traces;
};

// Fit the largest (epsilon) / smallest (kappa, N, xi) constants consistent
// with the traces, then verify the envelope
//   n_k <= max(n_0 - epsilon * floor(k / N), kappa) + N * max(xi, 0)
// independently over every trace.
inline ContractionReport check_contraction(
    std::vector<std::vector<double>> traces) {
  if (traces.empty()) throw error("check_contraction: no traces");
  ContractionReport rep;
  rep.traces = std::move(traces);

  bool xi_set = false, kappa_set = false;
  double t0max = 0.0;
  bool t0_set = false;
  for (const auto& T : rep.traces) {
    if (T.empty()) throw error("check_contraction: empty trace");
    for (std::size_t k = 0; k + 1 < T.size(); ++k) {
      const double inc = T[k + 1] - T[k];
      if (!xi_set || inc > rep.xi) rep.xi = inc, xi_set = true;
    }
    if (!kappa_set || T.back() > rep.kappa) rep.kappa = T.back(), kappa_set = true;
    if (!t0_set || T.front() > t0max) t0max = T.front(), t0_set = true;
    if (T.size() >= 2) rep.N = std::max(rep.N, T.size() - 1);
  }
  if (!xi_set) rep.xi = 0.0;

  const double slack = static_cast<double>(rep.N) * std::max(rep.xi, 0.0);
  double eps = 0.0;
  bool constrained = false;
  for (const auto& T : rep.traces)
    for (std::size_t k = 1; k < T.size(); ++k) {
      const std::size_t blocks = k / rep.N;
      if (blocks == 0) continue;
      if (T[k] - slack <= rep.kappa) continue;
      const double cap =
          (T[0] - T[k] + slack) / static_cast<double>(blocks);
      if (!constrained || cap < eps) eps = cap, constrained = true;
    }
  if (!constrained) eps = t0max - rep.kappa;
  rep.epsilon = std::max(0.0, eps);

  rep.envelope_ok = true;
  for (const auto& T : rep.traces)
    for (std::size_t k = 0; k < T.size(); ++k) {
      const double bound =
          std::max(T[0] - rep.epsilon * static_cast<double>(k / rep.N),
                   rep.kappa) +
          slack;
      if (T[k] > bound + 1e-12 * std::max(1.0, std::abs(bound)))
        rep.envelope_ok = false;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Exports.  Both are deterministic functions of the graph.

inline std::string to_dot(const OrbitGraph& g) {
  std::vector<bool> in_att(g.nodes.size(), false);
  for (std::size_t v : g.attractor) in_att[v] = true;
  std::string out = "digraph orbit {\n  rankdir=LR;\n";
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    out += "  n" + std::to_string(v) + " [label=\"" + g.nodes[v].str() + "\"";
    if (in_att[v]) out += ", shape=doublecircle";
    out += "];\n";
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    for (const auto& [cid, to] : g.edges[v])
      out += "  n" + std::to_string(v) + " -> n" + std::to_string(to) +
             " [label=\"" + std::to_string(cid) + "\"];\n";
  out += "}\n";
  return out;
}

inline nlohmann::ordered_json graph_to_json(const OrbitGraph& g) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const Word& w : g.nodes) j["nodes"].push_back(w.str());
  j["edges"] = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    for (const auto& [cid, to] : g.edges[v])
      j["edges"].push_back({{"from", v}, {"connector", cid}, {"to", to}});
  j["closed"] = g.closed;
  j["attractor"] = g.attractor;
  if (g.steps_to_attractor.size() == g.nodes.size())
    j["steps_to_attractor"] = g.steps_to_attractor;
  return j;
}

}  // namespace corrx
