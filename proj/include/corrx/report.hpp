#pragma once

// Machine-readable run reports and the validated run configuration.
//
// Reports serialize through ordered JSON so that identical runs produce
// byte-identical output; wall-clock timings live in a single volatile
// field that deterministic comparisons can exclude.  Configurations come
// from one structured-text (JSON) format with exhaustive schema
// validation: the schema is versioned, every key is checked by name and
// type, and unknown keys are rejected rather than ignored.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corrx/biset.hpp"
#include "corrx/common.hpp"
#include "corrx/words.hpp"

namespace corrx {

using ojson = nlohmann::ordered_json;

// 64-bit FNV-1a over the canonical serialization; stable across platforms.
inline std::string fnv1a_digest(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

struct CheckRecord {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string command;
  ojson inputs = ojson::object();   // canonical config echo
  ojson results = ojson::object();  // command-specific payload
  std::vector<CheckRecord> checks;
  double elapsed_ms = 0.0;  // volatile; excluded from deterministic forms

  void check(std::string name, bool pass, std::string detail = "") {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }

  bool all_passed() const {
    for (const CheckRecord& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::string inputs_digest() const {
    return fnv1a_digest(command + "\n" + inputs.dump());
  }

  // Stable field order; pass include_timings = false for byte-identity
  // comparisons between runs.
  ojson to_json(bool include_timings = true) const {
    ojson j;
    j["command"] = command;
    j["schema"] = 1;
    j["inputs_digest"] = inputs_digest();
    j["inputs"] = inputs;
    j["results"] = results;
    ojson cs = ojson::array();
    for (const CheckRecord& c : checks) {
      ojson e;
      e["name"] = c.name;
      e["pass"] = c.pass;
      if (!c.detail.empty()) e["detail"] = c.detail;
      cs.push_back(std::move(e));
    }
    j["checks"] = std::move(cs);
    j["passed"] = all_passed();
    if (include_timings) j["timings"] = ojson{{"elapsed_ms", elapsed_ms}};
    return j;
  }
};

// ---------------------------------------------------------------------------
// Run configuration.

struct RunConfig {
  // Input sources: a named correspondence ("rabbit", "dendrite", "lodge",
  // "cubic", "quintic" from the catalog, plus "z2i" and "z2i-dynamical"),
  // or an explicit wreath recursion.
  std::string correspondence;
  std::optional<WreathRecursion> recursion;
  std::string name;  // target of `check`

  std::optional<cplx> basepoint;  // derivation basepoint override

  // Budgets.
  int seed_radius = 6;           // xray: seeds = all words of length <= r
  long long slope_bound = 20;    // curves: all slopes with max(|p|,|q|) <= B
  std::size_t max_nodes = std::size_t{1} << 20;
  std::size_t max_depth = std::size_t{1} << 20;
  int depth = 8;                 // limitset: backward-orbit depth n
  std::size_t budget = std::size_t{1} << 16;   // limitset: full-tree cap
  std::size_t sample_count = 4096;             // limitset: sampled-mode size
  std::vector<cplx> basepoints;                // limitset clouds (1 or 2)

  std::uint64_t rng_seed = 0;
  int samples_per_turn = 65;  // derivation loop density

  // Tolerances (defaults document the acceptance gates).
  double tol_cycle = 1e-9;       // cycle locations and multipliers
  double tol_residual = 1e-10;   // fixed/coincidence point residuals
  double tol_hausdorff = 0.20;   // two-cloud agreement bound

  std::string out_dir = ".";

  // Canonical echo: every field, fixed order, normalized values.
  ojson to_json() const {
    ojson j;
    j["schema"] = 1;
    j["correspondence"] = correspondence;
    if (recursion) {
      ojson r;
      r["rank"] = recursion->rank;
      r["sigma"] = recursion->sigma;
      ojson cof = ojson::array();
      for (const auto& row : recursion->cof) {
        ojson jr = ojson::array();
        for (const Word& w : row) jr.push_back(w.str());
        cof.push_back(std::move(jr));
      }
      r["cof"] = std::move(cof);
      j["recursion"] = std::move(r);
    } else {
      j["recursion"] = nullptr;
    }
    j["name"] = name;
    if (basepoint)
      j["basepoint"] = ojson::array({basepoint->real(), basepoint->imag()});
    else
      j["basepoint"] = nullptr;
    j["seed_radius"] = seed_radius;
    j["slope_bound"] = slope_bound;
    j["max_nodes"] = max_nodes;
    j["max_depth"] = max_depth;
    j["depth"] = depth;
    j["budget"] = budget;
    j["sample_count"] = sample_count;
    ojson bps = ojson::array();
    for (const cplx& z : basepoints)
      bps.push_back(ojson::array({z.real(), z.imag()}));
    j["basepoints"] = std::move(bps);
    j["rng_seed"] = rng_seed;
    j["samples_per_turn"] = samples_per_turn;
    j["tolerances"] = ojson{{"cycle", tol_cycle},
                            {"residual", tol_residual},
                            {"hausdorff", tol_hausdorff}};
    j["out_dir"] = out_dir;
    return j;
  }

  static RunConfig from_json(const ojson& j);
};

namespace detail {

inline const ojson& field(const ojson& j, const char* key) {
  return j.at(key);
}

inline void expect_type(const ojson& v, const char* key, const char* want,
                        bool ok) {
  if (!ok)
    throw error(std::string("config: key \"") + key + "\" must be " + want);
}

inline cplx parse_point(const ojson& v, const char* key) {
  expect_type(v, key, "an array [re, im] of two numbers",
              v.is_array() && v.size() == 2 && v[0].is_number() &&
                  v[1].is_number());
  return cplx(v[0].get<double>(), v[1].get<double>());
}

inline WreathRecursion parse_recursion(const ojson& v) {
  for (const auto& [key, sub] : v.items()) {
    if (key != "rank" && key != "sigma" && key != "cof")
      throw error("config: unknown key \"recursion." + key + "\"");
    (void)sub;
  }
  WreathRecursion rec;
  expect_type(field(v, "rank"), "recursion.rank", "an integer >= 1",
              field(v, "rank").is_number_integer() &&
                  field(v, "rank").get<int>() >= 1);
  rec.rank = field(v, "rank").get<int>();
  const ojson& sig = field(v, "sigma");
  expect_type(sig, "recursion.sigma", "an array of slot arrays",
              sig.is_array());
  for (const ojson& row : sig) {
    expect_type(row, "recursion.sigma", "an array of slot arrays",
                row.is_array());
    std::vector<std::size_t> r;
    for (const ojson& e : row) {
      expect_type(e, "recursion.sigma", "nonnegative slot indices",
                  e.is_number_integer() && e.get<long long>() >= 0);
      r.push_back(e.get<std::size_t>());
    }
    rec.sigma.push_back(std::move(r));
  }
  const ojson& cof = field(v, "cof");
  expect_type(cof, "recursion.cof", "an array of word arrays",
              cof.is_array());
  for (const ojson& row : cof) {
    expect_type(row, "recursion.cof", "an array of word arrays",
                row.is_array());
    std::vector<Word> r;
    for (const ojson& e : row) {
      expect_type(e, "recursion.cof", "word strings", e.is_string());
      r.push_back(Word::parse(e.get<std::string>()));
    }
    rec.cof.push_back(std::move(r));
  }
  rec.D = rec.sigma.empty() ? 0 : rec.sigma.front().size();
  rec.validate();
  return rec;
}

}  // namespace detail

inline RunConfig RunConfig::from_json(const ojson& j) {
  if (!j.is_object()) throw error("config: top level must be an object");
  if (!j.contains("schema"))
    throw error("config: missing required key \"schema\"");

  RunConfig cfg;
  for (const auto& [key, v] : j.items()) {
    using detail::expect_type;
    if (key == "schema") {
      expect_type(v, "schema", "the integer 1",
                  v.is_number_integer() && v.get<int>() == 1);
    } else if (key == "correspondence") {
      expect_type(v, "correspondence", "a string", v.is_string());
      cfg.correspondence = v.get<std::string>();
    } else if (key == "recursion") {
      if (!v.is_null()) cfg.recursion = detail::parse_recursion(v);
    } else if (key == "name") {
      expect_type(v, "name", "a string", v.is_string());
      cfg.name = v.get<std::string>();
    } else if (key == "basepoint") {
      if (!v.is_null()) cfg.basepoint = detail::parse_point(v, "basepoint");
    } else if (key == "seed_radius") {
      expect_type(v, "seed_radius", "an integer", v.is_number_integer());
      cfg.seed_radius = v.get<int>();
    } else if (key == "slope_bound") {
      expect_type(v, "slope_bound", "a nonnegative integer",
                  v.is_number_integer() && v.get<long long>() >= 0);
      cfg.slope_bound = v.get<long long>();
    } else if (key == "max_nodes") {
      expect_type(v, "max_nodes", "a positive integer",
                  v.is_number_integer() && v.get<long long>() > 0);
      cfg.max_nodes = v.get<std::size_t>();
    } else if (key == "max_depth") {
      expect_type(v, "max_depth", "a positive integer",
                  v.is_number_integer() && v.get<long long>() > 0);
      cfg.max_depth = v.get<std::size_t>();
    } else if (key == "depth") {
      expect_type(v, "depth", "a nonnegative integer",
                  v.is_number_integer() && v.get<long long>() >= 0);
      cfg.depth = v.get<int>();
    } else if (key == "budget") {
      expect_type(v, "budget", "a positive integer",
                  v.is_number_integer() && v.get<long long>() > 0);
      cfg.budget = v.get<std::size_t>();
    } else if (key == "sample_count") {
      expect_type(v, "sample_count", "a positive integer",
                  v.is_number_integer() && v.get<long long>() > 0);
      cfg.sample_count = v.get<std::size_t>();
    } else if (key == "basepoints") {
      expect_type(v, "basepoints", "an array of [re, im] points",
                  v.is_array() && v.size() <= 2);
      for (const ojson& e : v)
        cfg.basepoints.push_back(detail::parse_point(e, "basepoints"));
    } else if (key == "rng_seed") {
      expect_type(v, "rng_seed", "a nonnegative integer",
                  v.is_number_unsigned() ||
                      (v.is_number_integer() && v.get<long long>() >= 0));
      cfg.rng_seed = v.get<std::uint64_t>();
    } else if (key == "samples_per_turn") {
      expect_type(v, "samples_per_turn", "an odd integer >= 3",
                  v.is_number_integer() && v.get<int>() >= 3 &&
                      v.get<int>() % 2 == 1);
      cfg.samples_per_turn = v.get<int>();
    } else if (key == "tolerances") {
      expect_type(v, "tolerances", "an object", v.is_object());
      for (const auto& [tk, tv] : v.items()) {
        expect_type(tv, "tolerances", "positive numbers",
                    tv.is_number() && tv.get<double>() > 0);
        if (tk == "cycle")
          cfg.tol_cycle = tv.get<double>();
        else if (tk == "residual")
          cfg.tol_residual = tv.get<double>();
        else if (tk == "hausdorff")
          cfg.tol_hausdorff = tv.get<double>();
        else
          throw error("config: unknown key \"tolerances." + tk + "\"");
      }
    } else if (key == "out_dir") {
      expect_type(v, "out_dir", "a string", v.is_string());
      cfg.out_dir = v.get<std::string>();
    } else {
      throw error("config: unknown key \"" + key + "\"");
    }
  }
  return cfg;
}

}  // namespace corrx
