// sfcheck: batch runner for the space-form geometry checks.
//
// Subcommands: check-a, check-b, check-c, submersion, theorem1, levelset,
// horosphere, corpus-regress.  Scenes are JSON files (see README); reports
// are deterministic JSON (plus optional CSV of per-sample residuals).
// Exit codes: 0 all asserted expectations pass, 2 expectation failure,
// 1 input error.

#include "spaceform/scene.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

using namespace spaceform;
using scene::ordered_json;

namespace {

struct Options {
  std::string scene_file;
  std::string out_file;
  std::string csv_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol_predicate, tol_level, tol_fiber, tol_rank,
      tol_model, tol_fd_step, tol_search_radius;
  int threads = 1;
};

void apply_overrides(scene::Scene& s, const Options& opt) {
  if (opt.seed) s.plan.seed = *opt.seed;
  if (opt.samples) s.plan.random_samples = *opt.samples;
  if (opt.tol_predicate) s.tol.predicate = *opt.tol_predicate;
  if (opt.tol_level) s.tol.level = *opt.tol_level;
  if (opt.tol_fiber) s.tol.fiber = *opt.tol_fiber;
  if (opt.tol_rank) s.tol.rank = *opt.tol_rank;
  if (opt.tol_model) s.tol.model = *opt.tol_model;
  if (opt.tol_fd_step) s.tol.fd_step = *opt.tol_fd_step;
  if (opt.tol_search_radius) s.tol.search_radius = *opt.tol_search_radius;
}

template <typename F>
void parallel_for(int n, int threads, F f) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        f(i);
      }
    });
  for (auto& th : pool) th.join();
}

void emit(const ordered_json& report, const Options& opt) {
  std::string text = report.dump(2) + "\n";
  if (opt.out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.out_file, std::ios::binary);
    out << text;
  }
}

void emit_csv(const std::vector<std::string>& rows, const Options& opt) {
  if (opt.csv_file.empty()) return;
  std::ofstream out(opt.csv_file, std::ios::binary);
  for (const auto& r : rows) out << r << "\n";
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// expectation bookkeeping: exit 2 when any asserted expectation fails
struct Gate {
  bool any_asserted = false;
  bool all_pass = true;

  void assert_outcome(ordered_json& j, const std::string& expected,
                      const std::string& actual) {
    any_asserted = true;
    bool ok = expected == actual;
    j["expected"] = expected;
    j["expectation_pass"] = ok;
    all_pass = all_pass && ok;
  }
  int exit_code() const { return all_pass ? 0 : 2; }
};

std::string aggregate_outcome(const std::vector<PredicateVerdict>& verdicts) {
  bool any_hold = false, any_fail = false;
  for (const auto& v : verdicts) (v.holds ? any_hold : any_fail) = true;
  if (any_hold && !any_fail) return "holds";
  if (any_fail && !any_hold) return "fails";
  return verdicts.empty() ? "not-applicable" : "mixed";
}

int run_per_sample(const std::string& predicate, scene::Scene& s,
                   const Options& opt) {
  ordered_json report = scene::report_header("check-" + predicate, s);
  std::vector<std::string> csv;
  csv.push_back("patch,predicate,parameter...,residual,holds");
  Gate gate;
  report["patches"] = ordered_json::array();
  for (const auto& sp : s.patches) {
    std::vector<Vec> samples = sample_parameters(sp.patch, s.plan);
    int n = static_cast<int>(samples.size());
    std::vector<PredicateVerdict> verdicts(n);
    parallel_for(n, opt.threads, [&](int i) {
      std::uint64_t seed = splitmix64(s.plan.seed ^ (i * 3 + 1));
      if (predicate == "b")
        verdicts[i] = check_B(sp.patch, samples[i], sp.W, s.tol, seed);
      else if (predicate == "c")
        verdicts[i] = check_C(sp.patch, samples[i], sp.W, s.tol, seed);
      else
        verdicts[i] = check_submersion(sp.patch, samples[i], sp.W, s.tol);
    });

    ordered_json jp;
    jp["id"] = sp.id;
    jp["samples"] = ordered_json::array();
    double max_residual = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& v = verdicts[i];
      ordered_json js;
      js["parameter"] = scene::to_json(samples[i]);
      js["holds"] = v.holds;
      js["residual"] = v.residual;
      if (v.witness_w) js["witness_w"] = scene::to_json(v.witness_w->x);
      if (v.witness_eta) js["witness_eta"] = scene::to_json(*v.witness_eta);
      jp["samples"].push_back(js);
      max_residual = std::max(max_residual, v.residual);
      std::string row = sp.id + "," + predicate;
      for (int k = 0; k < samples[i].size(); ++k)
        row += "," + csv_num(samples[i][k]);
      row += "," + csv_num(v.residual) + "," + (v.holds ? "1" : "0");
      csv.push_back(row);
    }
    std::string outcome = aggregate_outcome(verdicts);
    jp["outcome"] = outcome;
    jp["max_residual"] = max_residual;
    std::string key = predicate == "b"   ? "B"
                      : predicate == "c" ? "C"
                                         : "submersion";
    auto it = sp.expect.find(key);
    if (it != sp.expect.end()) gate.assert_outcome(jp, it->second, outcome);
    report["patches"].push_back(jp);
  }
  report["expectations_pass"] = gate.all_pass;
  emit(report, opt);
  emit_csv(csv, opt);
  return gate.exit_code();
}

int run_check_a(scene::Scene& s, const Options& opt) {
  ordered_json report = scene::report_header("check-a", s);
  std::vector<std::string> csv;
  csv.push_back("patch,start...,spread,stalled");
  Gate gate;
  report["patches"] = ordered_json::array();
  for (const auto& sp : s.patches) {
    ACheckReport rep = check_A_fiberwise(sp.patch, sp.W, s.plan, s.tol);
    ordered_json jp;
    jp["id"] = sp.id;
    std::string outcome = rep.not_applicable ? "not-applicable"
                          : rep.holds        ? "holds"
                                             : "fails";
    jp["outcome"] = outcome;
    jp["max_spread"] = rep.max_spread;
    if (rep.failing_sample)
      jp["submersion_failure_at"] = scene::to_json(*rep.failing_sample);
    jp["fibers"] = ordered_json::array();
    for (const auto& w : rep.walks) {
      ordered_json jw;
      jw["start"] = scene::to_json(w.start);
      jw["spread"] = w.spread;
      jw["steps"] = w.steps;
      jw["stalled"] = w.stalled;
      jp["fibers"].push_back(jw);
      std::string row = sp.id;
      for (int k = 0; k < w.start.size(); ++k)
        row += "," + csv_num(w.start[k]);
      row += "," + csv_num(w.spread) + "," + (w.stalled ? "1" : "0");
      csv.push_back(row);
    }
    auto it = sp.expect.find("A");
    if (it != sp.expect.end()) gate.assert_outcome(jp, it->second, outcome);
    report["patches"].push_back(jp);
  }
  report["expectations_pass"] = gate.all_pass;
  emit(report, opt);
  emit_csv(csv, opt);
  return gate.exit_code();
}

int run_theorem1(scene::Scene& s, const Options& opt) {
  ordered_json report = scene::report_header("theorem1", s);
  Gate gate;
  bool consistent_everywhere = true;
  report["patches"] = ordered_json::array();
  for (const auto& sp : s.patches) {
    Theorem1Report rep = theorem1_consistency(sp.patch, sp.W, s.plan, s.tol);
    ordered_json jp;
    jp["id"] = sp.id;
    jp["A"] = to_string(rep.A);
    jp["B"] = rep.B ? "holds" : "fails";
    jp["C"] = rep.C ? "holds" : "fails";
    jp["submersion"] = rep.submersion_ok ? "holds" : "fails";
    jp["a_spread"] = rep.a_spread;
    jp["b_worst_holding_residual"] = rep.b_worst_residual;
    jp["b_best_failing_residual"] = rep.b_best_residual;
    jp["c_worst_residual"] = rep.c_worst_residual;
    jp["samples"] = rep.samples;
    jp["implications"] = ordered_json::array();
    for (const auto& cell : rep.cells) {
      ordered_json jc;
      jc["name"] = cell.name;
      jc["applicable"] = cell.applicable;
      jc["violated"] = cell.violated;
      jp["implications"].push_back(jc);
    }
    jp["consistent"] = rep.consistent;
    consistent_everywhere = consistent_everywhere && rep.consistent;
    auto check = [&](const char* key, const std::string& actual) {
      auto it = sp.expect.find(key);
      if (it == sp.expect.end()) return;
      ordered_json je;
      je["predicate"] = key;
      gate.assert_outcome(je, it->second, actual);
      jp["expectations"].push_back(je);
    };
    jp["expectations"] = ordered_json::array();
    check("A", to_string(rep.A));
    check("B", rep.B ? "holds" : "fails");
    check("C", rep.C ? "holds" : "fails");
    check("submersion", rep.submersion_ok ? "holds" : "fails");
    report["patches"].push_back(jp);
  }
  report["consistent"] = consistent_everywhere;
  report["expectations_pass"] = gate.all_pass && consistent_everywhere;
  emit(report, opt);
  return (gate.all_pass && consistent_everywhere) ? 0 : 2;
}

LipschitzField build_field(const scene::Scene& s, const scene::ScenePatch& sp) {
  if (!s.field || s.field->kind == "distance-to-W")
    return LipschitzField::distance_to(sp.space, sp.W);
  if (s.field->kind == "distance-to-point")
    return LipschitzField::distance_to(sp.space, Point{s.field->point});
  if (s.field->kind == "distance-to-cloud")
    return LipschitzField::distance_to(sp.space, s.field->cloud);
  if (!sp.busemann_xi)
    throw scene::SceneError("scene.patches." + sp.id,
                            "busemann field needs busemann_xi");
  Point o{Vec::Unit(sp.space.ambient_dim(), 0) / sp.space.sqrt_abs_c()};
  return LipschitzField::busemann_field(
      sp.space, make_ideal(sp.space, *sp.busemann_xi, o));
}

int run_levelset(scene::Scene& s, const Options& opt) {
  ordered_json report = scene::report_header("levelset", s);
  Gate gate;
  bool consistent_everywhere = true;
  report["patches"] = ordered_json::array();
  for (const auto& sp : s.patches) {
    LipschitzField field = build_field(s, sp);
    double violation = lipschitz_violation(field, 1000, s.plan.seed, 2.0,
                                           s.tol);
    LevelReport rep = verify_level(field, sp.patch, s.plan, s.tol);
    ordered_json jp;
    jp["id"] = sp.id;
    jp["lipschitz_constant"] = field.lipschitz_constant();
    jp["lipschitz_violation"] = violation;
    jp["lipschitz_ok"] = violation <= 1e-7;
    std::string outcome = rep.constant ? "holds" : "fails";
    jp["outcome"] = outcome;
    jp["spread"] = rep.spread;
    jp["level"] = rep.level;
    jp["max_hypothesis_residual"] = rep.max_hypothesis_residual;
    jp["consistent"] = rep.consistent;
    consistent_everywhere =
        consistent_everywhere && rep.consistent && violation <= 1e-7;
    auto it = sp.expect.find("level-constant");
    if (it != sp.expect.end()) gate.assert_outcome(jp, it->second, outcome);
    report["patches"].push_back(jp);
  }
  report["consistent"] = consistent_everywhere;
  report["expectations_pass"] = gate.all_pass && consistent_everywhere;
  emit(report, opt);
  return (gate.all_pass && consistent_everywhere) ? 0 : 2;
}

int run_horosphere(scene::Scene& s, const Options& opt) {
  ordered_json report = scene::report_header("horosphere", s);
  Gate gate;
  bool consistent_everywhere = true;
  report["patches"] = ordered_json::array();
  for (const auto& sp : s.patches) {
    if (!sp.busemann_xi)
      throw scene::SceneError("scene.patches." + sp.id,
                              "horosphere check needs busemann_xi");
    Point o{Vec::Unit(sp.space.ambient_dim(), 0) / sp.space.sqrt_abs_c()};
    IdealPoint xi = make_ideal(sp.space, *sp.busemann_xi, o, s.tol);
    Theorem13Report rep = check_theorem_1_3(sp.patch, xi, s.plan, s.tol);
    ordered_json jp;
    jp["id"] = sp.id;
    std::string outcome =
        rep.hypothesis_holds && rep.level_constant ? "holds" : "fails";
    jp["outcome"] = outcome;
    jp["hypothesis_holds"] = rep.hypothesis_holds;
    jp["level_constant"] = rep.level_constant;
    jp["max_residual"] = rep.max_residual;
    jp["spread"] = rep.spread;
    jp["level"] = rep.level;
    jp["consistent"] = rep.consistent;
    consistent_everywhere = consistent_everywhere && rep.consistent;
    auto it = sp.expect.find("theorem-1-3");
    if (it != sp.expect.end()) gate.assert_outcome(jp, it->second, outcome);
    report["patches"].push_back(jp);
  }
  report["consistent"] = consistent_everywhere;
  report["expectations_pass"] = gate.all_pass && consistent_everywhere;
  emit(report, opt);
  return (gate.all_pass && consistent_everywhere) ? 0 : 2;
}

int run_corpus_regress(const Options& opt) {
  std::uint64_t seed = opt.seed.value_or(0);
  Tolerances tol;
  if (opt.tol_predicate) tol.predicate = *opt.tol_predicate;
  if (opt.tol_level) tol.level = *opt.tol_level;
  if (opt.tol_fiber) tol.fiber = *opt.tol_fiber;
  if (opt.tol_rank) tol.rank = *opt.tol_rank;
  if (opt.tol_model) tol.model = *opt.tol_model;
  if (opt.tol_fd_step) tol.fd_step = *opt.tol_fd_step;
  if (opt.tol_search_radius) tol.search_radius = *opt.tol_search_radius;

  std::vector<std::string> ids = corpus::all_ids();
  int n = static_cast<int>(ids.size());
  std::vector<scene::EntryRegress> results(n);
  parallel_for(n, opt.threads, [&](int i) {
    results[i] = scene::run_entry_regress(corpus::entry(ids[i]), seed, tol);
  });

  ordered_json report;
  report["schema_version"] = scene::kSchemaVersion;
  report["tool_version"] = scene::kToolVersion;
  report["subcommand"] = "corpus-regress";
  report["scene_hash"] = "builtin-corpus";
  report["seed"] = seed;
  report["entries"] = ordered_json::array();
  std::vector<std::string> csv;
  csv.push_back("entry,predicate,expected,actual,residual,pass");
  bool all_pass = true;
  for (const auto& r : results) {
    report["entries"].push_back(scene::to_json(r));
    all_pass = all_pass && r.pass;
    for (const auto& row : r.rows)
      csv.push_back(r.id + "," + row.predicate + "," + row.expected + "," +
                    row.actual + "," + csv_num(row.residual) + "," +
                    (row.pass ? "1" : "0"));
  }
  report["expectations_pass"] = all_pass;
  emit(report, opt);
  emit_csv(csv, opt);
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-form geometry checks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_scene) {
    if (needs_scene)
      cmd->add_option("scene", opt.scene_file, "scene JSON file")
          ->required()
          ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt.seed, "override the plan seed");
    cmd->add_option("--samples", opt.samples, "override random sample count");
    cmd->add_option("--tol-predicate", opt.tol_predicate,
                    "verdict threshold for the predicates");
    cmd->add_option("--tol-level", opt.tol_level, "level-set constancy");
    cmd->add_option("--tol-fiber", opt.tol_fiber, "fiber distance spread");
    cmd->add_option("--tol-rank", opt.tol_rank, "singular value cutoff");
    cmd->add_option("--tol-model", opt.tol_model, "model residency");
    cmd->add_option("--tol-fd-step", opt.tol_fd_step,
                    "finite difference base step");
    cmd->add_option("--tol-search-radius", opt.tol_search_radius,
                    "search radius over noncompact W");
    cmd->add_option("--out", opt.out_file, "report file (default stdout)");
    cmd->add_option("--csv", opt.csv_file, "CSV residual table");
    cmd->add_option("--threads", opt.threads, "worker count (default 1)");
  };

  std::string sub;
  for (const char* name : {"check-a", "check-b", "check-c", "submersion",
                           "theorem1", "levelset", "horosphere"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, true);
    cmd->callback([&sub, name] { sub = name; });
  }
  {
    CLI::App* cmd = app.add_subcommand(
        "corpus-regress", "run the shipped entries against their tables");
    add_common(cmd, false);
    cmd->callback([&sub] { sub = "corpus-regress"; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub == "corpus-regress") return run_corpus_regress(opt);
    scene::Scene s = scene::load_scene(opt.scene_file);
    apply_overrides(s, opt);
    if (sub == "check-a") return run_check_a(s, opt);
    if (sub == "check-b") return run_per_sample("b", s, opt);
    if (sub == "check-c") return run_per_sample("c", s, opt);
    if (sub == "submersion") return run_per_sample("submersion", s, opt);
    if (sub == "theorem1") return run_theorem1(s, opt);
    if (sub == "levelset") return run_levelset(s, opt);
    if (sub == "horosphere") return run_horosphere(s, opt);
    std::cerr << "unknown subcommand\n";
    return 1;
  } catch (const scene::SceneError& ex) {
    std::cerr << "scene error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
