// Copyright 2026 The schemapar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "schemapar/dependence.hpp"
#include "schemapar/interpreter.hpp"
#include "schemapar/normalize.hpp"
#include "schemapar/parallel.hpp"
#include "schemapar/text.hpp"
#include "schemapar/validate.hpp"

namespace schemapar::cli {

namespace {

using nlohmann::json;

// Raised for problems with the command line or the input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string format = "text";
  std::uint64_t seed = 1;
  std::uint64_t fuel = 1000000;
  std::uint64_t cap = 1000000;
};

std::string load_text(const std::string& path) {
  try {
    return read_file(path);
  } catch (const SchemaError& e) {
    throw InputError(e.what());
  }
}

Schema load_schema(const std::string& path, bool validated = true) {
  std::string text = load_text(path);
  try {
    return validated ? parse_schema(text) : parse_schema_unchecked(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

Params params_of(const std::string& text) {
  try {
    return parse_params(text);
  } catch (const SchemaError& e) {
    throw InputError(e.what());
  }
}

Bounds bounds_of(const std::string& text) {
  try {
    return parse_bounds(text);
  } catch (const SchemaError& e) {
    throw InputError(e.what());
  }
}

// Sidecar `<file>.bounds` (one or more comma or newline separated ranges),
// then the command-line ranges on top.
Bounds bounds_for(const std::string& path, const std::string& cli) {
  Bounds result;
  std::filesystem::path side(path);
  side.replace_extension(".bounds");
  if (std::filesystem::exists(side)) {
    std::string text = load_text(side.string());
    std::string joined;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      line = line.substr(0, line.find('#'));
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      joined += (joined.empty() ? "" : ",") + line;
    }
    try {
      result = parse_bounds(joined);
    } catch (const SchemaError& e) {
      throw InputError(side.string() + ": " + e.what());
    }
  }
  for (const auto& [k, r] : bounds_of(cli)) result[k] = r;
  return result;
}

// `key=value` with a non-negative integer value.
std::uint64_t keyed_number(const std::string& text, const std::string& key) {
  std::string prefix = key + "=";
  std::string digits = text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : text;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw InputError("expected " + key + "=N, got '" + text + "'");
  }
  try {
    return std::stoull(digits);
  } catch (const std::exception&) {
    throw InputError("number out of range in '" + text + "'");
  }
}

void require_format(const Globals& g, std::initializer_list<const char*> allowed, const std::string& command) {
  for (const char* f : allowed) {
    if (g.format == f) return;
  }
  throw InputError("format " + g.format + " is not available for " + command);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int cmd_check(const Globals& g, const std::string& path, std::ostream& out) {
  require_format(g, {"text", "json"}, "check");
  Schema s = load_schema(path, false);
  ValidationReport vr = validate(s);
  std::vector<LViolation> lv = check_l_schema(s);
  std::vector<ForwardViolation> fv;
  bool forward_checked = vr.ok() && lv.empty();
  if (forward_checked) fv = forward_violations(s);
  bool ok = vr.ok() && lv.empty() && fv.empty();

  if (g.format == "json") {
    json j;
    j["ok"] = ok;
    j["validation"] = json::array();
    for (const auto& i : vr.issues) j["validation"].push_back({{"label", i.label}, {"message", i.message}});
    j["loop_structure"] = json::array();
    for (const auto& v : lv) {
      j["loop_structure"].push_back(
          {{"block", v.block},
           {"label", v.label},
           {"kind", v.kind == LViolation::Kind::LabelOrder ? "label-order" : "recursion"},
           {"message", v.message}});
    }
    if (forward_checked) {
      j["forward"] = json::array();
      for (const auto& v : fv) {
        j["forward"].push_back(
            {{"block", v.block}, {"reader", v.reader}, {"writer", v.writer}, {"variable", v.variable}});
      }
    } else {
      j["forward"] = nullptr;
    }
    out << j.dump(2) << "\n";
  } else {
    out << "validation: " << (vr.ok() ? "ok" : std::to_string(vr.issues.size()) + " issue(s)") << "\n";
    for (const auto& i : vr.issues) out << "  " << (i.label.empty() ? "" : i.label + ": ") << i.message << "\n";
    out << "loop structure: " << (lv.empty() ? "ok" : std::to_string(lv.size()) + " violation(s)") << "\n";
    for (const auto& v : lv) out << "  " << v.message << "\n";
    if (!forward_checked) {
      out << "forward orientation: not checked\n";
    } else {
      out << "forward orientation: " << (fv.empty() ? "ok" : std::to_string(fv.size()) + " violation(s)") << "\n";
      for (const auto& v : fv) {
        out << "  " << v.reader << " uses index " << v.variable << ", changed later by " << v.writer << "\n";
      }
    }
    out << "status: " << (ok ? "ok" : "failed") << "\n";
  }
  return ok ? kOk : kAnalysisFailure;
}

// ---------------------------------------------------------------------------
// separate
// ---------------------------------------------------------------------------

struct SeparateArgs {
  std::string path;
  std::string loop;
  std::string verify;
  std::string diagram;
  std::string params;
  std::string emit;
  bool orient = false;
};

Label first_loop(const Schema& s) {
  for (const auto& i : s.main.instructions) {
    if (i.as_loop()) return i.label;
  }
  throw SchemaError("no loop in the main block; use --loop");
}

int cmd_separate(const Globals& g, const SeparateArgs& a, std::ostream& out) {
  require_format(g, {"text", "json"}, "separate");
  Schema s = load_schema(a.path);
  Params params = params_of(a.params);
  std::optional<std::uint64_t> trials;
  if (!a.verify.empty()) trials = keyed_number(a.verify, "trials");
  std::optional<Diagram> diagram;
  std::string diagram_path = a.diagram;
  if (diagram_path.empty() && trials) {
    std::filesystem::path side(a.path);
    side.replace_extension(".diag");
    if (std::filesystem::exists(side)) diagram_path = side.string();
  }
  if (!diagram_path.empty()) {
    std::string text = load_text(diagram_path);
    try {
      diagram = Diagram::parse(text);
    } catch (const SchemaError& e) {
      throw InputError(diagram_path + ": " + e.what());
    }
  }

  if (a.orient) {
    if (!check_l_schema(s).empty()) throw SchemaError("schema is not loop-structured; cannot orient");
    s = forward_orient(s);
  }
  Label label = a.loop.empty() ? first_loop(s) : a.loop;
  auto [sep, rep] = separate_loop(s, label);
  if (!a.emit.empty()) {
    std::ofstream f(a.emit);
    if (!f) throw InputError("cannot write " + a.emit);
    f << pretty_print(sep.schema);
  }

  json j;
  j["loop"] = label;
  j["controller_count"] = rep.controller_count;
  j["strictly_separated"] = rep.strictly_separated;
  j["level_conditions"] = rep.level_conditions_hold;
  j["controllers"] = sep.controllers;
  j["kernel"] = sep.kernel;
  j["dispatch_vars"] = sep.dispatch_vars;
  j["levels"] = json::array();
  for (const auto& l : rep.levels) j["levels"].push_back({{"labels", l.labels}, {"limited", l.limited}});

  bool failed = false;
  if (trials) {
    Verdict v = t_equal_check(s, sep.schema, *trials, g.fuel, g.seed);
    j["verify"]["t_equal"] = {{"trials", *trials},
                              {"compared", v.compared},
                              {"skipped", v.skipped},
                              {"counterexample", v.counterexample},
                              {"detail", v.detail}};
    failed = failed || v.counterexample;
    if (diagram) {
      Memory preset;
      for (const auto& [k, val] : params) preset[CellKey::simple(k)] = Term::integer(val);
      try {
        DepthReport d = verify_controller_count(sep, *diagram, g.fuel, preset);
        j["verify"]["depth"] = {{"depth", d.depth}, {"kernel_accesses", d.kernel_accesses}, {"consistent", d.consistent}};
        failed = failed || !d.consistent;
      } catch (const SchemaError& e) {
        j["verify"]["depth"] = {{"error", e.what()}};
        failed = true;
      }
    } else {
      j["verify"]["depth"] = nullptr;
    }
  }

  if (g.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << pretty_print(sep.schema) << "\n";
    out << "loop: " << label << "\n";
    out << "controllers: " << rep.controller_count << "\n";
    out << "strictly separated: " << yes_no(rep.strictly_separated) << "\n";
    out << "level conditions: " << (rep.level_conditions_hold ? "hold" : "violated") << "\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
      bool kernel = i + 1 == rep.levels.size();
      out << (kernel ? std::string("kernel") : "level " + std::to_string(i + 1)) << ": "
          << (rep.levels[i].labels.empty() ? "(empty)" : join(rep.levels[i].labels, " "));
      if (!rep.levels[i].limited.empty()) out << " | limited: " << join(rep.levels[i].limited, " ");
      out << "\n";
    }
    if (trials) {
      const auto& t = j["verify"]["t_equal"];
      out << "t-equality: " << (t["counterexample"].get<bool>() ? "counterexample (" + t["detail"].get<std::string>() + ")" : "no counterexample")
          << " in " << t["compared"].get<std::size_t>() << " compared trials\n";
      const auto& d = j["verify"]["depth"];
      if (d.is_null()) {
        out << "depth: not checked (no diagram)\n";
      } else if (d.contains("error")) {
        out << "depth: " << d["error"].get<std::string>() << "\n";
      } else {
        out << "depth: " << d["depth"].get<int>() << (d["consistent"].get<bool>() ? " (consistent)" : " (mismatch)")
            << "\n";
      }
    }
  }
  return failed ? kAnalysisFailure : kOk;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string path;
  std::string bounds;
  std::string params;
  bool oracle = false;
  std::size_t list = 32;
};

std::string class_text(const EquationClass& c) {
  if (c.kind == EquationClass::Kind::General) return "general (" + c.reason + "): unsolvable statically";
  if (c.kind == EquationClass::Kind::Polynomial) return c.str() + ": not solved exactly";
  return c.str();
}

int cmd_analyze(const Globals& g, const AnalyzeArgs& a, std::ostream& out) {
  require_format(g, {"text", "json", "dot"}, "analyze");
  Schema s = load_schema(a.path);
  Params params = params_of(a.params);
  Bounds bounds = derive_bounds(s, params, bounds_for(a.path, a.bounds));

  if (g.format == "dot") {
    RunOptions ro;
    ro.fuel = g.fuel;
    auto edges = brute_force_dependences(s, oracle_interpretation(s, params, g.seed), ro);
    out << dependence_dot(edges);
    return kOk;
  }

  SolveOptions so;
  so.cap = g.cap;
  so.params = params;
  json j;
  j["bounds"] = json::object();
  for (const auto& [k, r] : bounds) j["bounds"][k] = {r.first, r.second};
  j["equations"] = json::array();
  std::ostringstream text;
  text << "bounds:";
  for (const auto& [k, r] : bounds) text << " " << k << "=" << r.first << ".." << r.second;
  text << "\n";
  auto equations = build_connection_equations(s, bounds);
  text << "equations: " << equations.size() << "\n";
  for (const auto& eq : equations) {
    EquationClass c = classify(eq, params);
    json e{{"equation", eq.str()},
           {"kind", eq.kind == ConnectionEquation::Kind::Flow ? "flow" : "output"},
           {"class", c.str()}};
    text << (eq.kind == ConnectionEquation::Kind::Flow ? "flow   " : "output ") << eq.str() << ": " << class_text(c);
    if (c.kind == EquationClass::Kind::General) e["note"] = "unsolvable statically: " + c.reason;
    if (c.kind == EquationClass::Kind::Linear) {
      SolutionSet sol;
      bool capped = false;
      try {
        sol = solve_linear(eq, so);
      } catch (const CapExceeded& ce) {
        sol = ce.partial();
        capped = true;
      }
      json sj{{"kind", to_string(sol.kind)},
              {"count", sol.pairs.size()},
              {"particular", sol.particular},
              {"generators", sol.generators}};
      if (!sol.note.empty()) sj["note"] = sol.note;
      json pairs = json::array();
      for (const auto& [m1, m2] : sol.pairs) {
        if (pairs.size() >= a.list) break;
        pairs.push_back({m1, m2});
      }
      sj["pairs"] = pairs;
      sj["pairs_truncated"] = sol.pairs.size() > a.list;
      e["solution"] = sj;
      if (capped) {
        text << ", cap exceeded (parametric only)";
      } else if (sol.kind == SolutionSet::Kind::Enumerated) {
        text << ", " << sol.pairs.size() << " pair(s)";
      } else {
        text << ", " << to_string(sol.kind) << (sol.note.empty() ? "" : " (" + sol.note + ")");
      }
    }
    text << "\n";
    j["equations"].push_back(e);
  }

  int status = kOk;
  if (a.oracle) {
    try {
      ComparisonReport rep = solver_vs_oracle(s, bounds, oracle_interpretation(s, params, g.seed), so, g.fuel);
      json o{{"comparable", true}, {"match", rep.match()}, {"mismatches", rep.mismatches()}};
      o["pairs"] = json::array();
      for (const auto& p : rep.pairs) {
        o["pairs"].push_back(
            {{"writer", p.writer}, {"reader", p.reader}, {"array", p.array}, {"solver", p.solver}, {"oracle", p.oracle}});
        text << "oracle " << p.writer << " -> " << p.reader << " on " << p.array << ": solver " << p.solver
             << ", oracle " << p.oracle << "\n";
      }
      text << "oracle: " << (rep.match() ? "match" : std::to_string(rep.mismatches()) + " mismatch(es)") << "\n";
      if (!rep.match()) status = kAnalysisFailure;
      j["oracle"] = o;
    } catch (const NotComparable& e) {
      j["oracle"] = {{"comparable", false}, {"reason", e.what()}};
      text << "oracle: not comparable (" << e.what() << ")\n";
      status = kAnalysisFailure;
    }
  }
  if (g.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return status;
}

// ---------------------------------------------------------------------------
// schedule
// ---------------------------------------------------------------------------

struct ScheduleArgs {
  std::string path;
  std::string bounds;
  std::string params;
  std::string replay;
  std::size_t members = 16;
  unsigned threads = 0;
};

int cmd_schedule(const Globals& g, const ScheduleArgs& a, std::ostream& out) {
  require_format(g, {"text", "json", "csv"}, "schedule");
  Schema s = load_schema(a.path);
  Params params = params_of(a.params);
  Bounds overrides = bounds_for(a.path, a.bounds);
  std::optional<std::uint64_t> replay_seed;
  if (!a.replay.empty()) replay_seed = keyed_number(a.replay, "seed");

  PredecessorProgram prog = predecessor_program(s);
  auto domain = iteration_domain(prog, params, overrides);
  auto violations = validate_predecessors(prog, domain, params);
  if (!violations.empty()) {
    json j;
    j["violations"] = json::array();
    for (const auto& v : violations) {
      j["violations"].push_back(
          {{"point", v.point}, {"label", v.label}, {"read", v.read}, {"target", v.target}});
    }
    if (g.format == "json") {
      out << j.dump(2) << "\n";
    } else {
      out << "predecessor violations: " << violations.size() << "\n";
      for (const auto& v : violations) {
        out << "  " << iteration_str(v.point) << " " << v.label << " reads " << v.read << " = "
            << iteration_str(v.target) << "\n";
      }
    }
    return kAnalysisFailure;
  }

  IterationGraph graph = build_graph(prog, domain, params);
  auto fronts = schedule_wavefronts(graph);
  bool independent = true;
  for (const auto& f : fronts) independent = independent && independent_set_check(graph, f.iterations);
  std::vector<std::vector<IterationVector>> sets;
  for (const auto& f : fronts) sets.push_back(f.iterations);
  bool sound = independent && coschedulable_check(graph, sets);

  std::optional<Hyperplane> plane;
  std::string plane_note;
  try {
    plane = find_hyperplane(prog, graph, params);
    if (!plane) plane_note = "none within the coefficient cap";
  } catch (const NonConstantDistances& e) {
    plane_note = e.what();
  }

  std::optional<ReplayReport> replay;
  if (replay_seed) {
    Interpretation interp = oracle_interpretation(s, params, *replay_seed);
    unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    replay = replay_wavefronts(prog, fronts, interp, *replay_seed, threads, g.fuel);
  }
  bool ok = sound && (!replay || replay->match);

  if (g.format == "csv") {
    out << schedule_csv(fronts);
  } else if (g.format == "json") {
    json j = json::parse(schedule_json(fronts, plane, a.members));
    j["points"] = domain.size();
    j["independent_fronts"] = independent;
    j["sound"] = sound;
    if (!plane_note.empty()) j["hyperplane_note"] = plane_note;
    if (replay) {
      j["replay"] = {{"match", replay->match}, {"cells", replay->compared_cells}, {"detail", replay->detail}};
    }
    out << j.dump(2) << "\n";
  } else {
    out << "points: " << domain.size() << "\n";
    out << "fronts: " << fronts.size() << "\n";
    out << "sizes:";
    for (const auto& f : fronts) out << " " << f.iterations.size();
    out << "\n";
    for (std::size_t i = 0; i < fronts.size() && i < 2; ++i) {
      out << "front " << i << ":";
      std::size_t shown = 0;
      for (const auto& it : fronts[i].iterations) {
        if (shown++ == a.members) {
          out << " ...";
          break;
        }
        out << " " << iteration_str(it);
      }
      out << "\n";
    }
    out << "fronts independent: " << yes_no(independent) << "\n";
    if (plane) {
      out << "hyperplane: normal " << iteration_str(plane->normal) << ", planes " << plane->first << ".."
          << plane->last << ", " << (plane->verified ? "verified" : "not coschedulable") << "\n";
    } else {
      out << "hyperplane: " << plane_note << "\n";
    }
    if (replay) {
      out << "replay: " << (replay->match ? "match" : "MISMATCH " + replay->detail) << " (" << replay->compared_cells
          << " cells)\n";
    }
  }
  return ok ? kOk : kAnalysisFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Program schema analysis: separation, dependences and wavefront schedules.", "schemapar"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "text, json, dot or csv")
      ->check(CLI::IsMember({"text", "json", "dot", "csv"}));
  app.add_option("--seed", g.seed, "seed for random interpretations");
  app.add_option("--fuel", g.fuel, "step limit per run")->check(CLI::PositiveNumber);
  app.add_option("--cap", g.cap, "enumeration cap for equation solutions")->check(CLI::PositiveNumber);

  std::string check_path;
  auto* check = app.add_subcommand("check", "validate, loop structure and forward orientation");
  check->add_option("file", check_path)->required();

  SeparateArgs sa;
  auto* separate = app.add_subcommand("separate", "split a loop body into controllers and a kernel");
  separate->add_option("file", sa.path)->required();
  separate->add_option("--loop", sa.loop, "label of the loop (default: first loop of main)");
  separate->add_option("--verify", sa.verify, "trials=K: t-equality trials plus the depth check");
  separate->add_option("--diagram", sa.diagram, "predicate diagram (default: sidecar .diag)");
  separate->add_option("--param", sa.params, "N=4,...: values preset in the Herbrand run");
  separate->add_option("--emit-schema", sa.emit, "write the separated schema to a file");
  separate->add_flag("--orient", sa.orient, "forward-orient the schema first");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "connection equations of counted loop nests");
  analyze->add_option("file", aa.path)->required();
  analyze->add_option("--bounds", aa.bounds, "k=1..3,...: counter ranges");
  analyze->add_option("--param", aa.params, "N=3,...: parameter values");
  analyze->add_flag("--oracle", aa.oracle, "compare with an execution log");
  analyze->add_option("--list", aa.list, "pairs listed per equation");

  ScheduleArgs sc;
  auto* schedule = app.add_subcommand("schedule", "wavefront schedule of a predecessor program");
  schedule->add_option("file", sc.path)->required();
  schedule->add_option("--bounds", sc.bounds, "k=1..8,...: counter ranges");
  schedule->add_option("--param", sc.params, "N=8,...: parameter values");
  schedule->add_option("--replay", sc.replay, "seed=S: replay fronts in shuffled order");
  schedule->add_option("--members", sc.members, "members listed per front");
  schedule->add_option("--threads", sc.threads, "replay workers (default: hardware)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(g, check_path, out);
    if (*separate) return cmd_separate(g, sa, out);
    if (*analyze) return cmd_analyze(g, aa, out);
    return cmd_schedule(g, sc, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kAnalysisFailure;
  }
}

}  // namespace schemapar::cli
