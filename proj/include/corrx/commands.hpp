#pragma once

// Command layer shared by the command-line tool and the report tests.
// Every command is a deterministic function of (config, rng seed): it
// returns a Report and writes its artifacts (DOT/JSON automata, CSV
// clouds) under the configured output directory.  Worker counts come from
// the CORRX_WORKERS environment variable alone, and never change any
// output byte.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corrx/backward_orbit.hpp"
#include "corrx/biset.hpp"
#include "corrx/correspondence.hpp"
#include "corrx/curves.hpp"
#include "corrx/derive.hpp"
#include "corrx/report.hpp"

namespace corrx {

inline int env_workers() {
  const char* e = std::getenv("CORRX_WORKERS");
  if (!e || !*e) return 1;
  char* end = nullptr;
  const long v = std::strtol(e, &end, 10);
  if (end == e || *end != '\0' || v < 1 || v > 1024)
    throw error("CORRX_WORKERS must be a positive integer");
  return static_cast<int>(v);
}

// Catalog entries plus the two z^2+i presentations: "z2i" is the induced
// correspondence between moduli spaces, "z2i-dynamical" the covering pair
// in the map's own plane whose punctures are the postcritical points.
inline Correspondence correspondence_by_name(const std::string& name) {
  if (name == "z2i") return make_z2i();
  if (name == "z2i-dynamical") return z2i_dynamical_plane();
  return catalog_entry(name);
}

namespace detail {

inline void write_artifact(const std::string& dir, const std::string& file,
                           const std::string& contents) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = std::filesystem::path(dir) / file;
  std::ofstream os(p, std::ios::binary);
  if (!os) throw error("cannot write artifact: " + p.string());
  os << contents;
  if (!os.flush()) throw error("failed writing artifact: " + p.string());
}

inline std::vector<Word> ball_words(int rank, int radius) {
  std::vector<Word> out;
  if (radius < 0) return out;
  for_each_in_ball(rank, radius, [&](const Word& w) { out.push_back(w); });
  return out;
}

inline std::string fmt_cplx(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? " - " : " + ")
     << std::abs(z.imag()) << "i";
  return os.str();
}

inline ojson recursion_json(const WreathRecursion& rec) {
  ojson r;
  r["rank"] = rec.rank;
  r["degree"] = rec.D;
  r["sigma"] = rec.sigma;
  ojson cof = ojson::array();
  for (const auto& row : rec.cof) {
    ojson jr = ojson::array();
    for (const Word& w : row) jr.push_back(w.str());
    cof.push_back(std::move(jr));
  }
  r["cof"] = std::move(cof);
  return r;
}

struct RecursionSource {
  WreathRecursion rec;
  ConnectorSet connectors;
  ojson provenance = ojson::object();
};

// A recursion either comes verbatim from the config (trivial connectors,
// direction on slot 0) or is derived by path lifting from the named
// correspondence.
inline RecursionSource recursion_source(const RunConfig& cfg,
                                        const std::string& fallback) {
  RecursionSource src;
  if (cfg.recursion) {
    src.rec = *cfg.recursion;
    for (std::size_t s = 0; s < src.rec.D; ++s)
      src.connectors.connectors.push_back(BisetElement{Word(), s});
    src.connectors.direction = BisetElement{Word(), 0};
    src.provenance["source"] = "config";
  } else {
    const std::string name =
        cfg.correspondence.empty() ? fallback : cfg.correspondence;
    const Correspondence c = correspondence_by_name(name);
    const DerivedRecursion d =
        derive_wreath_recursion(c, cfg.basepoint, cfg.samples_per_turn);
    src.rec = d.rec;
    src.connectors = d.connectors;
    src.provenance["source"] = "derived";
    src.provenance["correspondence"] = name;
    src.provenance["basepoint"] = fmt_cplx(d.basepoint);
    src.provenance["samples_per_turn"] = d.samples_per_turn;
  }
  return src;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// catalog: enumerate the built-in correspondences with admissibility data.

inline Report cmd_catalog(const RunConfig& cfg) {
  Report rep;
  rep.command = "catalog";
  rep.inputs = cfg.to_json();
  ojson rows = ojson::array();
  for (const Correspondence& c : catalog()) {
    const AdmissibilityReport ar = check_admissible(c);
    ojson row;
    row["name"] = c.name;
    row["deg_phi"] = c.phi.degree();
    row["deg_rho"] = c.rho.degree();
    row["target_cusps"] =
        c.cusps_T.points.size() + (c.cusps_T.has_infinity ? 1 : 0);
    row["source_cusps"] =
        c.cusps_S.points.size() + (c.cusps_S.has_infinity ? 1 : 0);
    row["admissible"] = ar.admissible;
    rows.push_back(std::move(row));
    rep.check("admissible: " + c.name, ar.admissible);
  }
  rep.results["entries"] = std::move(rows);
  return rep;
}

// ---------------------------------------------------------------------------
// check: admissibility plus the name-specific catalog facts.

inline Report cmd_check(const RunConfig& cfg) {
  const std::string name = cfg.name.empty() ? cfg.correspondence : cfg.name;
  if (name.empty()) throw error("check: no correspondence name given");
  const Correspondence c = correspondence_by_name(name);

  Report rep;
  rep.command = "check";
  rep.inputs = cfg.to_json();
  rep.results["name"] = name;

  const AdmissibilityReport ar = check_admissible(c);
  for (const CheckItem& item : ar.items)
    rep.check("admissible: " + item.condition, item.pass, item.detail);

  const auto near = [](cplx z, cplx w, double tol) {
    return std::abs(z - w) < tol;
  };

  if (name == "cubic") {
    // Coincidence points are ideal (at the cusps 0 and 1); nothing is
    // fixed in the interior of the target surface.
    const auto fps = fixed_points(c);
    bool all_ideal = !fps.empty();
    for (const FixedPoint& fp : fps)
      all_ideal = all_ideal && fp.ideal && fp.residual < cfg.tol_residual;
    rep.check("coincidence points all ideal", all_ideal);
    rep.check("no interior fixed point", cycles(c, 1).found.empty());

    // The real 2-cycle at +-sqrt(5)/3 with multiplier 9/4.
    const auto rep2 = cycles(c, 2);
    const double s5 = std::sqrt(5.0);
    bool found = false, multiplier_ok = false;
    for (const Cycle& cyc : rep2.found) {
      if (cyc.singular || cyc.t_pts.size() != 2) continue;
      if (cyc.t_pts[0].inf || cyc.t_pts[1].inf) continue;
      const bool hit =
          (near(cyc.t_pts[0].z, cplx(s5 / 3.0, 0.0), cfg.tol_cycle) &&
           near(cyc.t_pts[1].z, cplx(-s5 / 3.0, 0.0), cfg.tol_cycle)) ||
          (near(cyc.t_pts[0].z, cplx(-s5 / 3.0, 0.0), cfg.tol_cycle) &&
           near(cyc.t_pts[1].z, cplx(s5 / 3.0, 0.0), cfg.tol_cycle));
      if (!hit) continue;
      found = true;
      multiplier_ok = near(cyc.multiplier, cplx(2.25, 0.0), cfg.tol_cycle);
      rep.results["two_cycle_multiplier"] =
          detail::fmt_cplx(cyc.multiplier);
    }
    rep.check("2-cycle at +-sqrt(5)/3", found);
    rep.check("2-cycle multiplier 9/4", multiplier_ok);
  } else if (name == "quintic") {
    // The three cusps are fixed; branch data over them.
    const auto fps = fixed_points(c);
    bool saw0 = false, saw1 = false, sawinf = false;
    for (const FixedPoint& fp : fps) {
      if (!fp.ideal || fp.residual > cfg.tol_residual) continue;
      if (fp.s.inf)
        sawinf = true;
      else if (std::abs(fp.s.z) < cfg.tol_cycle)
        saw0 = true;
      else if (std::abs(fp.s.z - 1.0) < cfg.tol_cycle)
        saw1 = true;
    }
    rep.check("cusp 0 fixed", saw0);
    rep.check("cusp 1 fixed", saw1);
    rep.check("cusp infinity fixed", sawinf);

    const auto branches = cusp_branches(c);
    const auto deg_at = [&](double x, bool inf) -> const CuspBranch* {
      for (const CuspBranch& b : branches) {
        if (inf && b.t.inf) return &b;
        if (!inf && !b.t.inf && std::abs(b.t.z - x) < 1e-9) return &b;
      }
      return nullptr;
    };
    const CuspBranch* b2 = deg_at(3.0, false);
    const CuspBranch* b4 = deg_at(-0.6, false);
    const CuspBranch* b0 = deg_at(0.0, false);
    const CuspBranch* binf = deg_at(0.0, true);
    rep.check("branch local degree 2", b2 && b2->deg_phi == 2);
    rep.check("branch local degree 4", b4 && b4->deg_phi == 4);
    rep.check("deg(phi, 0) = 3", b0 && b0->deg_phi == 3);
    rep.check("deg(phi, infinity) = 5", binf && binf->deg_phi == 5);

    // Second-map preimages of infinity: 0 and infinity, both unramified.
    bool rho_inf_ok = true;
    const auto pre = c.rho.preimages(SpherePt::infinity());
    rho_inf_ok = pre.size() == 2;
    for (const auto& [q, mult] : pre) {
      if (q.inf)
        rho_inf_ok = rho_inf_ok && mult == 1;
      else
        rho_inf_ok =
            rho_inf_ok && std::abs(q.z) < cfg.tol_cycle && mult == 1;
    }
    rep.check("rho preimages of infinity are {0, infinity}, unramified",
              rho_inf_ok);

    const auto crit = c.rho.critical_points();
    const double e5 = 3.0 / std::sqrt(5.0);
    bool crit_ok = crit.finite.size() == 2 && !crit.at_infinity;
    if (crit_ok) {
      const cplx c0 = crit.finite[0].first, c1 = crit.finite[1].first;
      crit_ok = (near(c0, cplx(0.0, e5), cfg.tol_cycle) &&
                 near(c1, cplx(0.0, -e5), cfg.tol_cycle)) ||
                (near(c0, cplx(0.0, -e5), cfg.tol_cycle) &&
                 near(c1, cplx(0.0, e5), cfg.tol_cycle));
    }
    rep.check("rho critical points +-3i/sqrt(5)", crit_ok);
  } else if (name == "rabbit") {
    const auto rep1 = cycles(c, 1);
    bool ok = rep1.found.size() == 3;
    for (const Cycle& cyc : rep1.found)
      ok = ok && !cyc.singular && !cyc.contradiction &&
           std::abs(cyc.multiplier) > 1.0;
    rep.check("three interior repelling coincidence points", ok);
  }

  return rep;
}

// ---------------------------------------------------------------------------
// derive-recursion: path lifting in the plane of the correspondence.

inline Report cmd_derive_recursion(const RunConfig& cfg) {
  const std::string name =
      cfg.correspondence.empty() ? "rabbit" : cfg.correspondence;
  const Correspondence c = correspondence_by_name(name);
  const DerivedRecursion d =
      derive_wreath_recursion(c, cfg.basepoint, cfg.samples_per_turn);

  Report rep;
  rep.command = "derive-recursion";
  rep.inputs = cfg.to_json();
  rep.results["correspondence"] = name;
  rep.results["recursion"] = detail::recursion_json(d.rec);
  rep.results["basepoint"] = detail::fmt_cplx(d.basepoint);
  rep.results["reader"] =
      d.reader.uses_rays() ? "vertical rays" : "real axis";
  rep.results["samples_per_turn"] = d.samples_per_turn;
  if (d.fixed_slot)
    rep.results["fixed_slot"] = *d.fixed_slot;
  else
    rep.results["fixed_slot"] = nullptr;

  bool consistent = true;
  std::string note;
  try {
    DynamicalBiset{d.rec}.validate();
  } catch (const error& e) {
    consistent = false;
    note = e.what();
  }
  rep.check("recursion tables well formed", true);
  rep.check("peripheral cycle products trivial or peripheral", consistent,
            note);

  detail::write_artifact(cfg.out_dir, "recursion.json",
                         detail::recursion_json(d.rec).dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------
// xray: orbit closure of the iteration, attractor, contraction envelope.

inline Report cmd_xray(const RunConfig& cfg) {
  Report rep;
  rep.command = "xray";
  rep.inputs = cfg.to_json();

  const detail::RecursionSource src = detail::recursion_source(cfg, "rabbit");
  rep.results["recursion"] = src.provenance;
  rep.results["seed_radius"] = cfg.seed_radius;

  const std::vector<Word> seeds =
      detail::ball_words(src.rec.rank, cfg.seed_radius);
  if (seeds.empty()) {
    // Nothing to iterate: emit empty artifacts and succeed.
    OrbitGraph g;
    detail::write_artifact(cfg.out_dir, "xray.dot", to_dot(g));
    detail::write_artifact(cfg.out_dir, "xray.json",
                           graph_to_json(g).dump(2) + "\n");
    rep.results["nodes"] = 0;
    rep.results["note"] = "empty seed list";
    rep.check("exploration closed", true, "no seeds");
    return rep;
  }

  ExploreLimits lim;
  lim.max_nodes = cfg.max_nodes;
  lim.max_depth = cfg.max_depth;
  lim.workers = env_workers();

  OrbitGraph g;
  bool closed_ok = true;
  std::string budget_note;
  try {
    g = explore(seeds, src.connectors, src.rec, lim);
  } catch (budget_error& be) {
    g = std::move(be.partial);
    closed_ok = false;
    budget_note = be.what();
  }

  if (closed_ok) {
    const std::vector<Word> att = attractor(g);
    rep.results["attractor_size"] = att.size();
    ojson aw = ojson::array();
    for (const Word& w : att) aw.push_back(w.str());
    rep.results["attractor"] = std::move(aw);

    // Contraction constants over strided norm traces.
    const std::size_t stride = std::max<std::size_t>(
        1, g.nodes.size() / 512);
    std::vector<std::vector<double>> traces;
    for (std::size_t v = 0; v < g.nodes.size(); v += stride)
      traces.push_back(norm_trace(ray_from(g, v)));
    const ContractionReport cr = check_contraction(std::move(traces));
    rep.results["contraction"] =
        ojson{{"kappa", cr.kappa},
              {"N", cr.N},
              {"epsilon", cr.epsilon},
              {"xi", cr.xi},
              {"envelope_ok", cr.envelope_ok},
              {"rays", (g.nodes.size() + stride - 1) / stride}};
    rep.check("attractor nonempty", !att.empty());
    rep.check("contraction envelope holds", cr.envelope_ok);
  }

  rep.results["nodes"] = g.nodes.size();
  rep.check("exploration closed", closed_ok, budget_note);

  detail::write_artifact(cfg.out_dir, "xray.dot", to_dot(g));
  detail::write_artifact(cfg.out_dir, "xray.json",
                         graph_to_json(g).dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------
// curves: multicurve pullback iteration on the four-punctured sphere.

inline Report cmd_curves(const RunConfig& cfg) {
  Report rep;
  rep.command = "curves";
  rep.inputs = cfg.to_json();

  const detail::RecursionSource src =
      detail::recursion_source(cfg, "z2i-dynamical");
  rep.results["recursion"] = src.provenance;
  rep.results["slope_bound"] = cfg.slope_bound;

  const DynamicalBiset B{src.rec};
  SlopeTable table(cfg.slope_bound);

  CurveOrbit g;
  bool closed_ok = true;
  std::string budget_note;
  try {
    g = curve_attractor(B, cfg.slope_bound, table, cfg.max_nodes);
  } catch (curve_budget_error& be) {
    g = std::move(be.partial);
    closed_ok = false;
    budget_note = be.what();
  }

  rep.results["states"] = g.nodes.size();
  if (closed_ok) {
    ojson att = ojson::array();
    for (const std::size_t v : g.attractor) att.push_back(g.nodes[v].str());
    rep.results["attractor"] = std::move(att);
    rep.results["attractor_size"] = g.attractor.size();
    bool all_fixed = true;
    for (std::size_t v = 0; v < g.nodes.size(); ++v)
      all_fixed = all_fixed && g.succ[v] == v;
    if (all_fixed && !g.nodes.empty())
      rep.results["note"] = "all states fixed";
    rep.check("attractor nonempty", g.nodes.empty() || !g.attractor.empty());
  }
  rep.check("exploration closed", closed_ok, budget_note);
  rep.check("all lifted classes recognized", g.unrecognized.empty());

  detail::write_artifact(cfg.out_dir, "curves.dot", curves_to_dot(g));
  detail::write_artifact(cfg.out_dir, "curves.json",
                         curves_to_json(g).dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------
// limitset: backward-orbit point clouds.

inline Report cmd_limitset(const RunConfig& cfg) {
  const std::string name =
      cfg.correspondence.empty() ? "cubic" : cfg.correspondence;
  const Correspondence c = correspondence_by_name(name);

  std::vector<cplx> bps = cfg.basepoints;
  if (bps.empty()) bps.push_back(cplx(0.31, 0.17));

  Report rep;
  rep.command = "limitset";
  rep.inputs = cfg.to_json();
  rep.results["correspondence"] = name;
  rep.results["depth"] = cfg.depth;

  std::ostringstream csv;
  csv << "cloud,re,im,multiplicity\n";
  csv.precision(17);

  std::vector<std::vector<SpherePt>> clouds;
  ojson cloud_info = ojson::array();
  for (std::size_t ci = 0; ci < bps.size(); ++ci) {
    const BackwardOrbit orbit =
        backward_orbit_sample(c, SpherePt::at(bps[ci]), cfg.depth,
                              cfg.rng_seed, cfg.budget, cfg.sample_count);
    // Collapse exactly repeated endpoints (multiplicity expansion yields
    // bit-identical copies) into a multiplicity column, keeping first-
    // appearance order.
    std::vector<std::pair<SpherePt, int>> rows;
    std::map<std::tuple<bool, double, double>, std::size_t> seen;
    for (const SpherePt& p : orbit.points) {
      const auto key = std::make_tuple(p.inf, p.inf ? 0.0 : p.z.real(),
                                       p.inf ? 0.0 : p.z.imag());
      const auto [it, fresh] = seen.emplace(key, rows.size());
      if (fresh)
        rows.emplace_back(p, 1);
      else
        ++rows[it->second].second;
    }
    std::size_t total = 0;
    for (const auto& [p, m] : rows) {
      if (p.inf)
        csv << ci << ",inf,inf," << m << "\n";
      else
        csv << ci << "," << p.z.real() << "," << p.z.imag() << "," << m
            << "\n";
      total += static_cast<std::size_t>(m);
    }
    cloud_info.push_back(ojson{{"basepoint", detail::fmt_cplx(bps[ci])},
                               {"points", total},
                               {"rows", rows.size()},
                               {"sampled", orbit.sampled}});
    clouds.push_back(orbit.points);
  }
  rep.results["clouds"] = std::move(cloud_info);

  if (clouds.size() == 2) {
    const double h = hausdorff_chordal(clouds[0], clouds[1]);
    rep.results["hausdorff_chordal"] = h;
    rep.check("clouds within the agreement bound", h < cfg.tol_hausdorff);
  }
  rep.check("limit set computed", true);

  detail::write_artifact(cfg.out_dir, "limitset.csv", csv.str());
  return rep;
}

// ---------------------------------------------------------------------------
// verify-all: the whole battery at desk scale.

inline Report cmd_verify_all(const RunConfig& cfg) {
  Report rep;
  rep.command = "verify-all";
  rep.inputs = cfg.to_json();

  const auto absorb = [&rep](const std::string& prefix, const Report& sub) {
    for (const CheckRecord& c : sub.checks)
      rep.check(prefix + ": " + c.name, c.pass, c.detail);
  };

  // Catalog facts.
  absorb("catalog", cmd_catalog(cfg));
  for (const char* name : {"cubic", "quintic", "rabbit"}) {
    RunConfig sub = cfg;
    sub.name = name;
    absorb(std::string("check ") + name, cmd_check(sub));
  }

  // A small X-ray run, twice, with byte-identical artifacts.
  {
    RunConfig sub = cfg;
    sub.correspondence = "rabbit";
    sub.recursion.reset();
    sub.seed_radius = std::min(cfg.seed_radius, 6);
    sub.out_dir = cfg.out_dir + "/xray1";
    const Report r1 = cmd_xray(sub);
    absorb("xray", r1);
    sub.out_dir = cfg.out_dir + "/xray2";
    const Report r2 = cmd_xray(sub);
    const auto slurp = [](const std::string& p) {
      std::ifstream is(p, std::ios::binary);
      std::ostringstream ss;
      ss << is.rdbuf();
      return ss.str();
    };
    rep.check("xray artifacts deterministic",
              slurp(cfg.out_dir + "/xray1/xray.json") ==
                      slurp(cfg.out_dir + "/xray2/xray.json") &&
                  slurp(cfg.out_dir + "/xray1/xray.dot") ==
                      slurp(cfg.out_dir + "/xray2/xray.dot"));
    rep.check("xray reports deterministic",
              r1.to_json(false).dump() == r2.to_json(false).dump());
  }

  // A small curve-pullback run, twice.
  {
    RunConfig sub = cfg;
    sub.correspondence = "z2i-dynamical";
    sub.recursion.reset();
    sub.basepoint.reset();
    sub.slope_bound = std::min<long long>(cfg.slope_bound, 8);
    sub.out_dir = cfg.out_dir + "/curves1";
    const Report r1 = cmd_curves(sub);
    absorb("curves", r1);
    sub.out_dir = cfg.out_dir + "/curves2";
    const Report r2 = cmd_curves(sub);
    rep.check("curves reports deterministic",
              r1.to_json(false).dump() == r2.to_json(false).dump());
  }

  // Backward-orbit counting.
  {
    RunConfig sub = cfg;
    sub.correspondence = "cubic";
    sub.recursion.reset();
    sub.basepoint.reset();
    sub.depth = 3;
    sub.basepoints = {cplx(0.31, 0.17)};
    sub.out_dir = cfg.out_dir + "/limitset";
    const Report r = cmd_limitset(sub);
    absorb("limitset", r);
    std::size_t total = 0;
    for (const auto& cl : r.results.at("clouds"))
      total += cl.at("points").get<std::size_t>();
    rep.check("full tree has degree^depth points", total == 64,
              "expected 4^3 = 64, got " + std::to_string(total));
  }

  return rep;
}

}  // namespace corrx
