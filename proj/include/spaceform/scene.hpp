#pragma once

#include "spaceform/corpus.hpp"
#include "spaceform/expression.hpp"
#include "spaceform/levelset.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace spaceform::scene {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Scene validation failures carry the JSON path of the offending field.
struct SceneError : std::runtime_error {
  SceneError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path(path) {}
  std::string path;
};

namespace detail {

inline const json& require(const json& j, const char* key,
                           const std::string& path) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SceneError(path + "." + key, "missing field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SceneError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw SceneError(path, "number must be finite");
  return v;
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SceneError(path, "expected an integer");
  return j.get<int>();
}

inline std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) throw SceneError(path, "expected a string");
  return j.get<std::string>();
}

inline Vec vector(const json& j, const std::string& path, int expect = -1) {
  if (!j.is_array()) throw SceneError(path, "expected an array of numbers");
  if (expect >= 0 && static_cast<int>(j.size()) != expect)
    throw SceneError(path, "expected " + std::to_string(expect) + " entries");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<int>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

// column-major: JSON rows are the spanning vectors
inline Mat columns(const json& j, const std::string& path, int rows) {
  if (!j.is_array()) throw SceneError(path, "expected an array of vectors");
  Mat m(rows, static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    m.col(static_cast<int>(i)) =
        vector(j[i], path + "[" + std::to_string(i) + "]", rows);
  return m;
}

}  // namespace detail

struct FieldSpec {
  std::string kind;  // distance-to-W | distance-to-point | distance-to-cloud |
                     // busemann
  Vec point;
  std::vector<Point> cloud;
};

struct ScenePatch {
  std::string id;
  bool builtin = false;
  std::string entry_id;     // builtin kind
  SpaceForm space{3, 0.0};
  TotallyGeodesic W;
  ImmersedPatch patch{SpaceForm(2, 0.0), 1, Box{Vec::Zero(1), Vec::Ones(1)},
                      [](const Vec&) { return Vec(Vec::Zero(2)); }};
  std::optional<Vec> busemann_xi;
  std::optional<double> level_value;
  std::map<std::string, std::string> expect;  // predicate -> outcome string
};

struct Scene {
  int schema_version = kSchemaVersion;
  std::vector<ScenePatch> patches;
  SamplePlan plan;
  Tolerances tol;
  std::optional<FieldSpec> field;
  std::string hash;  // FNV-1a of the source bytes, when loaded from a file
};

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::map<std::string, std::string> parse_expect(
    const json& j, const std::string& path) {
  std::map<std::string, std::string> out;
  if (!j.is_object()) throw SceneError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v = str(it.value(), path + "." + it.key());
    if (v != "holds" && v != "fails" && v != "not-applicable")
      throw SceneError(path + "." + it.key(),
                       "expected holds | fails | not-applicable");
    out[it.key()] = v;
  }
  return out;
}

inline ScenePatch parse_builtin(const json& jp, const std::string& path) {
  ScenePatch sp;
  sp.builtin = true;
  sp.entry_id = str(require(jp, "entry", path), path + ".entry");
  corpus::CorpusEntry e = [&] {
    try {
      return corpus::entry(sp.entry_id);
    } catch (const UnknownEntry& ex) {
      throw SceneError(path + ".entry", ex.what());
    }
  }();
  sp.id = jp.contains("id") ? str(jp["id"], path + ".id") : e.id;
  sp.space = e.space;
  sp.W = e.W;
  sp.patch = e.patch;
  sp.busemann_xi = e.busemann_xi;
  sp.level_value = e.level_value;
  for (const auto& exp : e.expected) {
    if (!exp.at_params.empty()) continue;  // default-plan rows only
    const char* s = exp.outcome == corpus::Outcome::Holds   ? "holds"
                    : exp.outcome == corpus::Outcome::Fails ? "fails"
                                                            : "not-applicable";
    sp.expect[exp.predicate] = s;
  }
  if (jp.contains("expect"))
    for (auto& [k, v] : parse_expect(jp["expect"], path + ".expect"))
      sp.expect[k] = v;
  return sp;
}

inline ScenePatch parse_expression_patch(const json& jp, const json& jscene,
                                         const std::string& path,
                                         const std::string& scene_path) {
  ScenePatch sp;
  sp.id = str(require(jp, "id", path), path + ".id");

  const json& js = require(jscene, "space", scene_path);
  int n = integer(require(js, "n", scene_path + ".space"),
                  scene_path + ".space.n");
  double c = number(require(js, "c", scene_path + ".space"),
                    scene_path + ".space.c");
  if (n < 2) throw SceneError(scene_path + ".space.n", "need n >= 2");
  sp.space = SpaceForm(n, c);
  int dim = sp.space.ambient_dim();

  const json& jw = require(jscene, "W", scene_path);
  try {
    if (jw.contains("basis")) {
      if (!sp.space.curved())
        throw SceneError(scene_path + ".W.basis",
                         "a flat space needs origin + frame");
      sp.W = TotallyGeodesic::spanning(
          sp.space, columns(jw["basis"], scene_path + ".W.basis", dim));
    } else if (jw.contains("origin")) {
      Vec origin = vector(require(jw, "origin", scene_path + ".W"),
                          scene_path + ".W.origin", dim);
      Mat frame = jw.contains("frame")
                      ? columns(jw["frame"], scene_path + ".W.frame", dim)
                      : Mat(dim, 0);
      if (sp.space.curved()) {
        if (frame.cols() == 0) {
          sp.W = TotallyGeodesic::at_point(sp.space, Point{origin});
        } else {
          Mat span(dim, frame.cols() + 1);
          span.col(0) = origin;
          span.rightCols(frame.cols()) = frame;
          sp.W = TotallyGeodesic::spanning(sp.space, span);
        }
      } else {
        sp.W = TotallyGeodesic::affine(sp.space, Point{origin}, frame);
      }
    } else {
      throw SceneError(scene_path + ".W", "need either basis or origin+frame");
    }
  } catch (const GeometryError& ex) {
    throw SceneError(scene_path + ".W", ex.what());
  }

  const json& jparams = require(jp, "params", path);
  if (!jparams.is_array() || jparams.empty())
    throw SceneError(path + ".params", "expected a nonempty array of names");
  std::vector<std::string> params;
  for (std::size_t i = 0; i < jparams.size(); ++i)
    params.push_back(
        str(jparams[i], path + ".params[" + std::to_string(i) + "]"));
  int m = static_cast<int>(params.size());

  const json& jcomp = require(jp, "components", path);
  if (!jcomp.is_array() || static_cast<int>(jcomp.size()) != dim)
    throw SceneError(path + ".components",
                     "expected " + std::to_string(dim) + " expressions");
  std::vector<expr::Expression> comps;
  for (std::size_t i = 0; i < jcomp.size(); ++i) {
    std::string text =
        str(jcomp[i], path + ".components[" + std::to_string(i) + "]");
    try {
      comps.push_back(expr::Expression::parse(text, params));
    } catch (const expr::ExpressionError& ex) {
      throw SceneError(path + ".components[" + std::to_string(i) + "]",
                       ex.what());
    }
  }

  const json& jdom = require(jp, "domain", path);
  Vec lo = vector(require(jdom, "lo", path + ".domain"), path + ".domain.lo",
                  m);
  Vec hi = vector(require(jdom, "hi", path + ".domain"), path + ".domain.hi",
                  m);
  for (int i = 0; i < m; ++i)
    if (!(lo[i] < hi[i]))
      throw SceneError(path + ".domain", "lo must be strictly below hi");

  SpaceForm M = sp.space;
  sp.patch = ImmersedPatch(M, m, Box{lo, hi}, [comps, M](const Vec& u) -> Vec {
    Vec x(M.ambient_dim());
    for (int i = 0; i < x.size(); ++i) x[i] = comps[i].eval(u.data());
    return x;
  });

  if (jp.contains("exclusions")) {
    const json& jx = jp["exclusions"];
    if (!jx.is_array()) throw SceneError(path + ".exclusions", "expected an array");
    std::vector<std::pair<Vec, double>> balls;
    double guard = 0.0;
    for (std::size_t i = 0; i < jx.size(); ++i) {
      std::string p = path + ".exclusions[" + std::to_string(i) + "]";
      Vec center = vector(require(jx[i], "center", p), p + ".center", m);
      double radius = number(require(jx[i], "radius", p), p + ".radius");
      if (radius <= 0.0) throw SceneError(p + ".radius", "must be positive");
      balls.emplace_back(center, radius);
      guard = std::max(guard, radius);
    }
    sp.patch.set_exclusion(
        [balls](const Vec& u) {
          for (const auto& [center, radius] : balls)
            if ((u - center).norm() < radius) return true;
          return false;
        },
        guard);
  }

  if (jp.contains("busemann_xi"))
    sp.busemann_xi = vector(jp["busemann_xi"], path + ".busemann_xi", dim);
  if (jp.contains("expect"))
    sp.expect = parse_expect(jp["expect"], path + ".expect");
  return sp;
}

}  // namespace detail

inline Scene parse_scene(const json& j, const std::string& scene_path = "scene") {
  Scene s;
  using detail::integer;
  using detail::number;
  using detail::require;
  using detail::str;

  int version = integer(require(j, "schema_version", scene_path),
                        scene_path + ".schema_version");
  if (version != kSchemaVersion)
    throw SceneError(scene_path + ".schema_version",
                     "unsupported version " + std::to_string(version));
  s.schema_version = version;

  const json& jplan = require(j, "plan", scene_path);
  s.plan.seed = static_cast<std::uint64_t>(
      integer(require(jplan, "seed", scene_path + ".plan"),
              scene_path + ".plan.seed"));
  if (jplan.contains("grid")) {
    const json& jg = jplan["grid"];
    if (!jg.is_array()) throw SceneError(scene_path + ".plan.grid", "expected an array");
    for (std::size_t i = 0; i < jg.size(); ++i) {
      int g = integer(jg[i], scene_path + ".plan.grid[" + std::to_string(i) + "]");
      if (g < 1) throw SceneError(scene_path + ".plan.grid", "counts must be >= 1");
      s.plan.grid.push_back(g);
    }
  }
  if (jplan.contains("random_samples")) {
    s.plan.random_samples = integer(jplan["random_samples"],
                                    scene_path + ".plan.random_samples");
    if (s.plan.random_samples < 0)
      throw SceneError(scene_path + ".plan.random_samples", "must be >= 0");
  }
  if (jplan.contains("tolerances")) {
    const json& jt = jplan["tolerances"];
    if (!jt.is_object())
      throw SceneError(scene_path + ".plan.tolerances", "expected an object");
    auto get = [&](const char* key, double& slot) {
      if (jt.contains(key))
        slot = number(jt[key], scene_path + ".plan.tolerances." + key);
    };
    get("model", s.tol.model);
    get("antipode", s.tol.antipode);
    get("focal", s.tol.focal);
    get("rank", s.tol.rank);
    get("predicate", s.tol.predicate);
    get("fiber", s.tol.fiber);
    get("level", s.tol.level);
    get("fd_step", s.tol.fd_step);
    get("fiber_step", s.tol.fiber_step);
    get("search_radius", s.tol.search_radius);
    if (jt.contains("multistart"))
      s.tol.multistart =
          integer(jt["multistart"], scene_path + ".plan.tolerances.multistart");
    if (jt.contains("max_iter"))
      s.tol.max_iter =
          integer(jt["max_iter"], scene_path + ".plan.tolerances.max_iter");
  }

  const json& jpatches = require(j, "patches", scene_path);
  if (!jpatches.is_array() || jpatches.empty())
    throw SceneError(scene_path + ".patches", "expected a nonempty array");
  for (std::size_t i = 0; i < jpatches.size(); ++i) {
    std::string path = scene_path + ".patches[" + std::to_string(i) + "]";
    const json& jp = jpatches[i];
    std::string kind = str(require(jp, "kind", path), path + ".kind");
    if (kind == "builtin-corpus")
      s.patches.push_back(detail::parse_builtin(jp, path));
    else if (kind == "expression")
      s.patches.push_back(detail::parse_expression_patch(jp, j, path,
                                                         scene_path));
    else
      throw SceneError(path + ".kind",
                       "expected builtin-corpus | expression, got '" + kind +
                           "'");
  }

  if (j.contains("field")) {
    const json& jf = j["field"];
    std::string fpath = scene_path + ".field";
    FieldSpec f;
    f.kind = str(require(jf, "kind", fpath), fpath + ".kind");
    int dim = s.patches.front().space.ambient_dim();
    if (f.kind == "distance-to-point") {
      f.point = detail::vector(require(jf, "point", fpath), fpath + ".point",
                               dim);
    } else if (f.kind == "distance-to-cloud") {
      const json& jc = require(jf, "cloud", fpath);
      if (!jc.is_array() || jc.empty())
        throw SceneError(fpath + ".cloud", "expected a nonempty array");
      for (std::size_t i = 0; i < jc.size(); ++i)
        f.cloud.push_back(Point{detail::vector(
            jc[i], fpath + ".cloud[" + std::to_string(i) + "]", dim)});
    } else if (f.kind != "distance-to-W" && f.kind != "busemann") {
      throw SceneError(fpath + ".kind",
                       "expected distance-to-W | distance-to-point | "
                       "distance-to-cloud | busemann");
    }
    s.field = std::move(f);
  }
  return s;
}

inline Scene load_scene(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SceneError(file, "cannot open scene file");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& ex) {
    throw SceneError(file, std::string("JSON parse error: ") + ex.what());
  }
  Scene s = parse_scene(j);
  s.hash = fnv1a_hex(bytes);
  return s;
}

// Minimal scene that reloads a shipped corpus entry (round-trippable).
inline ordered_json corpus_scene_json(const std::string& entry_id,
                                      std::uint64_t seed) {
  corpus::CorpusEntry e = corpus::entry(entry_id);  // validates the id
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["patches"] = ordered_json::array();
  ordered_json jp;
  jp["id"] = e.id;
  jp["kind"] = "builtin-corpus";
  jp["entry"] = e.id;
  j["patches"].push_back(jp);
  j["plan"] = {{"seed", seed}};
  return j;
}

// ---------------------------------------------------------------------------
// Report helpers

inline ordered_json to_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline ordered_json report_header(const std::string& subcommand,
                                  const Scene& s) {
  ordered_json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["tool_version"] = kToolVersion;
  rep["subcommand"] = subcommand;
  rep["scene_hash"] = s.hash.empty() ? "none" : s.hash;
  rep["seed"] = s.plan.seed;
  return rep;
}

// ---------------------------------------------------------------------------
// Corpus regression: reproduce every expected verdict of an entry.

struct CheckRow {
  std::string predicate;
  std::string expected;
  std::string actual;
  double residual = 0.0;
  bool at_specific_params = false;
  bool pass = false;
};

struct EntryRegress {
  std::string id;
  std::vector<CheckRow> rows;
  bool pass = true;
};

namespace detail {

inline const char* outcome_str(corpus::Outcome o) {
  switch (o) {
    case corpus::Outcome::Holds: return "holds";
    case corpus::Outcome::Fails: return "fails";
    default: return "not-applicable";
  }
}

// Aggregates per-sample boolean verdicts: all-hold, all-fail, or mixed.
struct Aggregate {
  bool any_hold = false;
  bool any_fail = false;
  double residual = 0.0;

  void add(bool holds, double r) {
    (holds ? any_hold : any_fail) = true;
    residual = std::max(residual, r);
  }
  std::string outcome() const {
    if (any_hold && !any_fail) return "holds";
    if (any_fail && !any_hold) return "fails";
    return "mixed";
  }
};

}  // namespace detail

inline EntryRegress run_entry_regress(const corpus::CorpusEntry& e,
                                      std::uint64_t seed,
                                      const Tolerances& tol = {}) {
  EntryRegress out;
  out.id = e.id;
  SamplePlan plan;
  plan.seed = seed;
  plan.random_samples = 16;
  std::vector<Vec> default_samples = sample_parameters(e.patch, plan);

  for (const auto& exp : e.expected) {
    CheckRow row;
    row.predicate = exp.predicate;
    row.expected = detail::outcome_str(exp.outcome);
    row.at_specific_params = !exp.at_params.empty();
    const std::vector<Vec>& samples =
        exp.at_params.empty() ? default_samples : exp.at_params;

    if (exp.predicate == "A") {
      ACheckReport rep = check_A_fiberwise(e.patch, e.W, plan, tol);
      row.actual = rep.not_applicable ? "not-applicable"
                   : rep.holds        ? "holds"
                                      : "fails";
      row.residual = rep.max_spread;
    } else if (exp.predicate == "submersion" || exp.predicate == "B" ||
               exp.predicate == "C") {
      detail::Aggregate agg;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        PredicateVerdict v;
        std::uint64_t s = splitmix64(seed ^ (i * 3 + 1));
        if (exp.predicate == "submersion")
          v = check_submersion(e.patch, samples[i], e.W, tol);
        else if (exp.predicate == "B")
          v = check_B(e.patch, samples[i], e.W, tol, s);
        else
          v = check_C(e.patch, samples[i], e.W, tol, s);
        agg.add(v.holds, v.residual);
      }
      row.actual = agg.outcome();
      row.residual = agg.residual;
    } else if (exp.predicate == "level-constant") {
      if (!e.W.is_linear() && e.W.frame().cols() == 0) {
        auto field =
            LipschitzField::distance_to(e.space, e.W.origin());
        LevelReport rep = verify_level(field, e.patch, plan, tol);
        bool level_ok =
            !e.level_value || std::abs(rep.level - *e.level_value) < 1e-6;
        row.actual = rep.constant && level_ok ? "holds" : "fails";
        row.residual = rep.spread;
      } else {
        auto field = LipschitzField::distance_to(e.space, e.W);
        LevelReport rep = verify_level(field, e.patch, plan, tol);
        row.actual = rep.constant ? "holds" : "fails";
        row.residual = rep.spread;
      }
    } else if (exp.predicate == "theorem-1-3") {
      if (!e.busemann_xi)
        throw GeometryError("entry has no ideal point for theorem-1-3");
      Point o{Vec::Unit(e.space.ambient_dim(), 0) / e.space.sqrt_abs_c()};
      IdealPoint xi = make_ideal(e.space, *e.busemann_xi, o, tol);
      Theorem13Report rep = check_theorem_1_3(e.patch, xi, plan, tol);
      row.actual = rep.hypothesis_holds && rep.level_constant && rep.consistent
                       ? "holds"
                       : "fails";
      row.residual = std::max(rep.max_residual, rep.spread);
    } else {
      throw GeometryError("unknown expected predicate '" + exp.predicate +
                          "'");
    }
    row.pass = row.actual == row.expected;
    out.pass = out.pass && row.pass;
    out.rows.push_back(row);
  }
  return out;
}

inline ordered_json to_json(const EntryRegress& r) {
  ordered_json j;
  j["id"] = r.id;
  j["pass"] = r.pass;
  j["checks"] = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json c;
    c["predicate"] = row.predicate;
    c["expected"] = row.expected;
    c["actual"] = row.actual;
    c["residual"] = row.residual;
    c["at_specific_params"] = row.at_specific_params;
    c["pass"] = row.pass;
    j["checks"].push_back(c);
  }
  return j;
}

}  // namespace spaceform::scene
