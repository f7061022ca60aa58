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

// Acceptance run: one PASS/FAIL line per criterion, status 1 if any fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "../golden_cases.hpp"
#include "cli.hpp"
#include "schemapar/dependence.hpp"
#include "schemapar/interpreter.hpp"
#include "schemapar/normalize.hpp"
#include "schemapar/parallel.hpp"
#include "schemapar/text.hpp"

namespace schemapar {
namespace {

using Point = IterationVector;
using nlohmann::json;

const std::string kCorpus = SCHEMAPAR_CORPUS_DIR;
constexpr std::uint64_t kFuel = 20000;

struct Result {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(kCorpus)) {
    if (e.path().extension() == ".sch") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Schema load(const std::string& file) { return parse_schema_unchecked(read_file(kCorpus + "/" + file)); }

std::pair<int, std::string> cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int status = cli::run(args, out, err);
  return {status, out.str() + err.str()};
}

// Leveling straight from the stencil's read offsets.
std::map<Point, std::size_t> stencil_levels(std::int64_t n) {
  static const std::vector<Point> reads = {{0, -1, 0}, {0, 0, -1}, {-1, 1, 0}, {-1, 0, 1}};
  std::map<Point, std::size_t> level;
  std::function<std::size_t(const Point&)> rec = [&](const Point& p) -> std::size_t {
    if (auto it = level.find(p); it != level.end()) return it->second;
    std::size_t l = 0;
    for (const auto& r : reads) {
      Point q{p[0] + r[0], p[1] + r[1], p[2] + r[2]};
      bool inside = true;
      for (auto v : q) inside = inside && v >= 1 && v <= n;
      if (inside) l = std::max(l, rec(q) + 1);
    }
    return level[p] = l;
  };
  for (std::int64_t k = 1; k <= n; ++k) {
    for (std::int64_t i = 1; i <= n; ++i) {
      for (std::int64_t j = 1; j <= n; ++j) rec({k, i, j});
    }
  }
  return level;
}

struct Stencil {
  PredecessorProgram prog;
  Params params;
  IterationGraph graph;
};

Stencil stencil(std::int64_t n) {
  Stencil s{predecessor_program(load("stencil4_pred.sch")), {{"N", n}}, {}};
  s.graph = build_graph(s.prog, iteration_domain(s.prog, s.params), s.params);
  return s;
}

Result stencil_linearity() {
  Result o;
  auto start = std::chrono::steady_clock::now();
  std::ostringstream seen;
  for (std::int64_t n : {2, 4, 6, 8}) {
    auto [status, out] = cli_run({"--format", "json", "schedule", kCorpus + "/stencil4_pred.sch", "--param",
                                  "N=" + std::to_string(n), "--members", "0"});
    if (status != 0) {
      o.fail("schedule exited with " + std::to_string(status));
      continue;
    }
    json j = json::parse(out);
    std::size_t fronts = j["front_count"];
    std::size_t oracle = 0;
    for (const auto& [p, l] : stencil_levels(n)) oracle = std::max(oracle, l + 1);
    seen << " N=" << n << ":" << fronts << " (oracle " << oracle << ", 3N-2=" << 3 * n - 2 << ")";
    if (fronts != static_cast<std::size_t>(3 * n - 2)) o.fail("front count differs from 3N-2");
    if (fronts != oracle) o.fail("front count differs from the leveling oracle");
    if (!j["independent_fronts"].get<bool>()) o.fail("a front failed independent_set_check");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 5.0) o.fail("took " + std::to_string(secs) + " s");
  o.detail = (o.detail.empty() ? "" : o.detail + ";") + seen.str();
  return o;
}

Result first_fronts() {
  Result o;
  const std::vector<Point> front0 = {{1, 1, 1}};
  const std::vector<Point> front1 = {{1, 1, 2}, {1, 2, 1}, {2, 1, 1}};
  std::ostringstream seen;
  for (std::int64_t n : {2, 3, 5, 8}) {
    auto fronts = schedule_wavefronts(stencil(n).graph);
    if (fronts.size() < 2) {
      o.fail("fewer than two fronts");
      continue;
    }
    if (fronts[0].iterations != front0) o.fail("front 0 differs at N=" + std::to_string(n));
    if (fronts[1].iterations != front1) o.fail("front 1 differs at N=" + std::to_string(n));
    if (n == 2) {
      seen << " front 1 =";
      for (const auto& p : fronts[1].iterations) seen << " " << iteration_str(p);
    }
  }
  o.detail += seen.str();
  return o;
}

Result hyperplane() {
  Result o;
  for (std::int64_t n : {4, 8}) {
    Stencil s = stencil(n);
    auto ds = distance_vectors(s.prog, s.params);
    if (ds.size() != 4) o.fail("expected four distance vectors");
    auto plane = find_hyperplane(s.prog, s.graph, s.params);
    if (!plane) {
      o.fail("no hyperplane");
      continue;
    }
    // Exhaustive search for the smallest feasible normal in the same box.
    std::optional<std::tuple<std::int64_t, std::int64_t, Point>> best;
    for (std::int64_t a = -4; a <= 4; ++a) {
      for (std::int64_t b = -4; b <= 4; ++b) {
        for (std::int64_t c = -4; c <= 4; ++c) {
          bool ok = true;
          for (const auto& d : ds) ok = ok && a * d[0] + b * d[1] + c * d[2] >= 1;
          if (!ok) continue;
          auto key = std::make_tuple(std::max({std::abs(a), std::abs(b), std::abs(c)}),
                                     std::abs(a) + std::abs(b) + std::abs(c), Point{a, b, c});
          if (!best || key < *best) best = key;
        }
      }
    }
    if (!best || std::get<2>(*best) != plane->normal) o.fail("normal differs from exhaustive search");
    for (const auto& d : ds) {
      std::int64_t dot = 0;
      for (std::size_t i = 0; i < 3; ++i) dot += plane->normal[i] * d[i];
      if (dot < 1) o.fail("h.d < 1");
    }
    if (!coschedulable_check(s.graph, hyperplane_sets(s.graph, plane->normal))) o.fail("planes not coschedulable");
    if (n == 8) o.detail += " normal " + iteration_str(plane->normal);
  }
  return o;
}

Result solver_oracle() {
  Result o;
  std::size_t nests = 0, pairs = 0;
  for (const auto& f : corpus_files()) {
    Schema s = load(f);
    if (s.predecessor_semantics) continue;
    Params params{{"N", 5}};
    Bounds bounds = derive_bounds(s, params);
    auto eqs = build_connection_equations(s, bounds);
    if (eqs.empty()) continue;
    bool linear = true;
    for (const auto& eq : eqs) linear = linear && eq.bounded && classify(eq, params).kind == EquationClass::Kind::Linear;
    if (!linear) continue;
    std::uint64_t box = 1;
    for (const auto& [k, r] : bounds) box *= static_cast<std::uint64_t>(r.second - r.first + 1);
    if (box > 10000) continue;
    SolveOptions so;
    so.params = params;
    ComparisonReport r = solver_vs_oracle(s, bounds, oracle_interpretation(s, params, 1), so, 1000000);
    ++nests;
    for (const auto& p : r.pairs) pairs += p.oracle;
    if (!r.match()) o.fail(f + ": " + std::to_string(r.mismatches()) + " mismatches");
  }
  if (nests == 0) o.fail("no comparable nests");
  o.detail += " " + std::to_string(nests) + " nests, " + std::to_string(pairs) + " flow pairs";
  return o;
}

Label first_loop(const Schema& s) {
  for (const auto& i : s.main.instructions) {
    if (i.as_loop()) return i.label;
  }
  return "";
}

Result separation() {
  Result o;
  std::size_t loops = 0, rejected = 0;
  std::optional<std::size_t> list_count;
  for (const auto& f : corpus_files()) {
    Schema s = load(f);
    if (!check_l_schema(s).empty()) continue;
    Label loop = first_loop(s);
    if (loop.empty()) continue;
    Schema oriented = forward_orient(s);
    std::optional<std::pair<SeparatedLoop, SeparationReport>> sep;
    try {
      sep = separate_loop(oriented, loop);
    } catch (const EmptyIndexSet&) {
      ++rejected;
      continue;
    }
    ++loops;
    if (f == "list_traversal.sch") list_count = sep->second.controller_count;
    Verdict v = t_equal_check(oriented, sep->first.schema, 100, kFuel, 1);
    if (v.counterexample) o.fail(f + ": counterexample " + v.detail);
    if (v.compared == 0) o.fail(f + ": no trial finished");
    if (!level_conditions(sep->first)) o.fail(f + ": level conditions violated");
    std::filesystem::path diag = std::filesystem::path(kCorpus) / f;
    diag.replace_extension(".diag");
    Diagram d;
    if (std::filesystem::exists(diag)) d = Diagram::parse(read_file(diag.string()));
    Memory preset;
    preset[CellKey::simple("N")] = Term::integer(std::filesystem::exists(diag) ? 3 : 2);
    try {
      DepthReport r = verify_controller_count(sep->first, d, kFuel, preset);
      if (!r.consistent) o.fail(f + ": depth " + std::to_string(r.depth));
    } catch (const SchemaError& e) {
      o.fail(f + ": " + e.what());
    }
  }
  if (list_count != 2u) o.fail("list traversal controller count is not 2");
  o.detail += " " + std::to_string(loops) + " loops separated, " + std::to_string(rejected) +
              " without indexed variables; list traversal controllers = " +
              (list_count ? std::to_string(*list_count) : "none");
  return o;
}

Result forward_orientation() {
  Result o;
  std::size_t checked = 0;
  for (const auto& f : corpus_files()) {
    Schema s = load(f);
    if (!check_l_schema(s).empty()) continue;
    Schema oriented = forward_orient(s);
    ++checked;
    if (!check_forward(oriented)) o.fail(f + ": not forward oriented");
    if (!(forward_orient(oriented) == oriented)) o.fail(f + ": not idempotent");
    Verdict v = t_equal_check(s, oriented, 100, kFuel, 2);
    if (v.counterexample) o.fail(f + ": counterexample " + v.detail);
  }
  o.detail += " " + std::to_string(checked) + " L-schemas";
  return o;
}

Result line_phenomenon() {
  Result o;
  for (const char* f : {"skewed_nest_a.sch", "skewed_nest_b.sch"}) {
    Schema e = load(f);
    Interpretation interp = oracle_interpretation(e, {{"N", 5}}, 1);
    interp.predicates["gt"] = [](const std::vector<std::int64_t>& a) -> std::optional<bool> { return a[0] > a[1]; };
    IterationGraph g = dependence_graph(e, interp, 4, 1000000);
    auto ph = find_line_phenomenon(g);
    if (!ph) {
      o.fail(std::string(f) + ": no direction found");
      continue;
    }
    for (const auto& line : ph->lines) {
      if (!independent_set_check(g, line)) o.fail(std::string(f) + ": a line is not independent");
    }
    const auto& a = ph->lines[ph->first];
    const auto& b = ph->lines[ph->second];
    std::vector<Point> both = a;
    both.insert(both.end(), b.begin(), b.end());
    if (coschedulable_check(g, {both})) o.fail(std::string(f) + ": the two lines run together");
    o.detail += std::string(" ") + f + " direction " + iteration_str(ph->direction) + ";";
  }
  return o;
}

Result determinism() {
  Result o;
  for (const auto& c : testing::golden_cases()) {
    auto args = testing::expand(c.args, kCorpus);
    auto first = cli_run(args);
    auto second = cli_run(args);
    if (first != second) o.fail(c.name + ": runs differ");
    std::string golden;
    try {
      golden = read_file(std::string(SCHEMAPAR_GOLDEN_DIR) + "/" + c.name + ".out");
    } catch (const SchemaError&) {
      o.fail(c.name + ": golden file missing");
      continue;
    }
    if (first.second != golden) o.fail(c.name + ": differs from golden file");
    if (first.first != c.status) o.fail(c.name + ": status " + std::to_string(first.first));
  }
  o.detail += " " + std::to_string(testing::golden_cases().size()) + " golden reports";
  return o;
}

}  // namespace
}  // namespace schemapar

int main() {
  using namespace schemapar;
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"stencil wavefront count 3N-2 for N in {2,4,6,8}", stencil_linearity},
      {"first fronts {(1,1,1)} then {(1,2,1),(1,1,2),(2,1,1)}", first_fronts},
      {"stencil hyperplane normal and coschedulable planes", hyperplane},
      {"linear solver agrees with execution oracle", solver_oracle},
      {"separated corpus loops are t-equal with consistent depth", separation},
      {"forward orientation is sound and idempotent", forward_orientation},
      {"independent lines that are not coschedulable (N=5)", line_phenomenon},
      {"byte-identical reports across runs", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::string detail = o.detail.substr(std::min(o.detail.find_first_not_of(' '), o.detail.size()));
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << detail << "\n";
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
