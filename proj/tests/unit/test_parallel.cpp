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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "schemapar/parallel.hpp"
#include "test_util.hpp"

namespace schemapar {
namespace {

using testing::corpus_schema;
using Point = IterationVector;

const std::vector<Point> kStencilReads = {{0, -1, 0}, {0, 0, -1}, {-1, 1, 0}, {-1, 0, 1}};

bool in_cube(const Point& p, std::int64_t n) {
  for (auto v : p) {
    if (v < 1 || v > n) return false;
  }
  return true;
}

std::vector<Point> stencil_preds(const Point& p, std::int64_t n) {
  std::vector<Point> out;
  for (const auto& r : kStencilReads) {
    Point q{p[0] + r[0], p[1] + r[1], p[2] + r[2]};
    if (in_cube(q, n)) out.push_back(q);
  }
  return out;
}

// Longest predecessor chain ending at each point, straight from the read
// offsets of the stencil.
std::map<Point, std::size_t> stencil_levels(std::int64_t n) {
  std::map<Point, std::size_t> level;
  std::function<std::size_t(const Point&)> rec = [&](const Point& p) -> std::size_t {
    if (auto it = level.find(p); it != level.end()) return it->second;
    std::size_t l = 0;
    for (const auto& q : stencil_preds(p, n)) l = std::max(l, rec(q) + 1);
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
  Stencil s{predecessor_program(corpus_schema("stencil4_pred.sch")), {{"N", n}}, {}};
  s.graph = build_graph(s.prog, iteration_domain(s.prog, s.params), s.params);
  return s;
}

TEST(PredecessorProgram, StencilNest) {
  PredecessorProgram p = predecessor_program(corpus_schema("stencil4_pred.sch"));
  ASSERT_EQ(p.nest.size(), 3u);
  EXPECT_EQ(p.nest[0].counter.var, "k");
  ASSERT_EQ(p.statements.size(), 1u);
  EXPECT_EQ(p.statements[0].reads.size(), 4u);
  EXPECT_EQ(p.arrays, (std::set<std::string>{"f"}));
}

TEST(PredecessorProgram, RejectsOrdinarySemantics) {
  EXPECT_THROW(predecessor_program(corpus_schema("stencil4.sch")), SchemaError);
}

TEST(Graph, PredecessorsMatchReadOffsets) {
  Stencil s = stencil(3);
  ASSERT_EQ(s.graph.points.size(), 27u);
  for (std::size_t i = 0; i < s.graph.points.size(); ++i) {
    std::set<Point> got;
    for (auto q : s.graph.preds[i]) got.insert(s.graph.points[q]);
    auto want = stencil_preds(s.graph.points[i], 3);
    EXPECT_EQ(got, std::set<Point>(want.begin(), want.end())) << iteration_str(s.graph.points[i]);
  }
}

TEST(Wavefronts, MatchIndependentLeveling) {
  for (std::int64_t n : {2, 3, 4, 6, 8}) {
    Stencil s = stencil(n);
    auto fronts = schedule_wavefronts(s.graph);
    auto levels = stencil_levels(n);
    std::size_t depth = 0;
    for (const auto& [p, l] : levels) depth = std::max(depth, l + 1);
    ASSERT_EQ(fronts.size(), depth) << n;
    for (const auto& f : fronts) {
      for (const auto& p : f.iterations) EXPECT_EQ(levels.at(p), f.level) << n << " " << iteration_str(p);
      EXPECT_TRUE(independent_set_check(s.graph, f.iterations));
    }
  }
}

TEST(Wavefronts, FirstTwoFronts) {
  auto fronts = schedule_wavefronts(stencil(4).graph);
  ASSERT_GE(fronts.size(), 2u);
  EXPECT_EQ(fronts[0].iterations, (std::vector<Point>{{1, 1, 1}}));
  // (2,1,1) reads (1,2,1) and (1,1,2), so it waits one more front.
  EXPECT_EQ(fronts[1].iterations, (std::vector<Point>{{1, 1, 2}, {1, 2, 1}}));
}

TEST(Wavefronts, NoReadsSingleFront) {
  PredecessorProgram p = predecessor_program(corpus_schema("no_reads_pred.sch"));
  Params params{{"N", 3}};
  auto fronts = schedule_wavefronts(build_graph(p, iteration_domain(p, params), params));
  ASSERT_EQ(fronts.size(), 1u);
  EXPECT_EQ(fronts[0].iterations.size(), 9u);
}

TEST(Wavefronts, CycleDetected) {
  IterationGraph g;
  g.points = {{1}, {2}};
  g.preds = {{1}, {0}};
  EXPECT_THROW(schedule_wavefronts(g), CycleDetected);
}

TEST(Violations, FutureReadsReported) {
  PredecessorProgram p = predecessor_program(corpus_schema("future_read_pred.sch"));
  Params params{{"N", 3}};
  auto domain = iteration_domain(p, params);
  std::set<std::pair<Point, Point>> expected;
  for (const auto& it : domain) {
    Point target{it[0], it[1] + 1, it[2]};
    if (in_cube(target, 3)) expected.insert({it, target});
  }
  std::set<std::pair<Point, Point>> got;
  for (const auto& v : validate_predecessors(p, domain, params)) {
    EXPECT_EQ(v.label, "s1");
    got.insert({v.point, v.target});
  }
  EXPECT_EQ(got, expected);
  EXPECT_TRUE(validate_predecessors(stencil(3).prog, iteration_domain(stencil(3).prog, {{"N", 3}}), {{"N", 3}}).empty());
}

TEST(Cones, MatchTransitiveClosure) {
  Stencil s = stencil(3);
  std::map<Point, std::set<Point>> memo;
  std::function<const std::set<Point>&(const Point&)> closure = [&](const Point& p) -> const std::set<Point>& {
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    std::set<Point> c{p};
    for (const auto& q : stencil_preds(p, 3)) {
      const auto& sub = closure(q);
      c.insert(sub.begin(), sub.end());
    }
    return memo[p] = c;
  };
  for (const auto& p : s.graph.points) {
    Cone c = cone_of(s.graph, p);
    std::set<Point> got = c.members;
    got.insert(p);
    EXPECT_EQ(got, closure(p)) << iteration_str(p);
  }
  EXPECT_THROW(cone_of(s.graph, {9, 9, 9}), SchemaError);
}

TEST(Independence, DependentPairRejected) {
  Stencil s = stencil(3);
  EXPECT_TRUE(independent_set_check(s.graph, {{1, 1, 2}, {1, 2, 1}}));
  EXPECT_FALSE(independent_set_check(s.graph, {{1, 1, 1}, {1, 1, 2}}));
  EXPECT_FALSE(independent_set_check(s.graph, {{1, 1, 1}, {3, 3, 3}}));
}

TEST(Coschedule, OrderMatters) {
  Stencil s = stencil(3);
  std::vector<std::vector<Point>> sets;
  for (const auto& f : schedule_wavefronts(s.graph)) sets.push_back(f.iterations);
  EXPECT_TRUE(coschedulable_check(s.graph, sets));
  std::reverse(sets.begin(), sets.end());
  EXPECT_FALSE(coschedulable_check(s.graph, sets));
  // Points outside every set count as done.
  EXPECT_TRUE(coschedulable_check(s.graph, {{{1, 1, 2}, {1, 2, 1}}}));
}

TEST(Hyperplane, DistanceVectors) {
  Stencil s = stencil(4);
  EXPECT_EQ(distance_vectors(s.prog, s.params),
            (std::vector<Point>{{0, 0, 1}, {0, 1, 0}, {1, -1, 0}, {1, 0, -1}}));
}

// Exhaustive search over the same box and order.
std::optional<Point> normal_oracle(const std::vector<Point>& ds, int cap) {
  std::optional<Point> best;
  std::tuple<std::int64_t, std::int64_t, Point> best_key;
  std::size_t n = ds.front().size();
  std::vector<std::pair<std::int64_t, std::int64_t>> box(n, {-cap, cap});
  Point h(n);
  std::function<void(std::size_t)> rec = [&](std::size_t d) {
    if (d < n) {
      for (std::int64_t v = -cap; v <= cap; ++v) {
        h[d] = v;
        rec(d + 1);
      }
      return;
    }
    for (const auto& x : ds) {
      std::int64_t dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += h[i] * x[i];
      if (dot < 1) return;
    }
    std::int64_t mx = 0, sum = 0;
    for (auto v : h) {
      mx = std::max<std::int64_t>(mx, std::abs(v));
      sum += std::abs(v);
    }
    auto key = std::make_tuple(mx, sum, h);
    if (!best || key < best_key) {
      best = h;
      best_key = key;
    }
  };
  rec(0);
  return best;
}

TEST(Hyperplane, NormalMatchesExhaustiveSearch) {
  const std::vector<std::vector<Point>> cases = {
      {{0, 0, 1}, {0, 1, 0}, {1, -1, 0}, {1, 0, -1}},
      {{1, 0}, {0, 1}},
      {{1, -2}, {0, 1}},
      {{2, -1, 0}, {0, 3, -1}, {0, 0, 1}},
  };
  for (const auto& ds : cases) EXPECT_EQ(find_normal(ds), normal_oracle(ds, 4));
  EXPECT_EQ(find_normal({{1}, {-1}}), std::nullopt);
  EXPECT_EQ(find_normal({}), std::nullopt);
}

TEST(Hyperplane, StencilPlanesCoschedulable) {
  Stencil s = stencil(4);
  auto plane = find_hyperplane(s.prog, s.graph, s.params);
  ASSERT_TRUE(plane);
  for (const auto& d : distance_vectors(s.prog, s.params)) {
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < d.size(); ++i) dot += plane->normal[i] * d[i];
    EXPECT_GE(dot, 1);
  }
  EXPECT_TRUE(plane->verified);
  EXPECT_TRUE(coschedulable_check(s.graph, hyperplane_sets(s.graph, plane->normal)));
}

IterationGraph skewed_graph(const std::string& file) {
  Schema e = corpus_schema(file);
  Interpretation interp = oracle_interpretation(e, {{"N", 5}}, 1);
  interp.predicates["gt"] = [](const std::vector<std::int64_t>& a) -> std::optional<bool> { return a[0] > a[1]; };
  return dependence_graph(e, interp, 4, 1000000);
}

TEST(LinePhenomenon, FoundOnSkewedNest) {
  for (const char* f : {"skewed_nest_a.sch", "skewed_nest_b.sch"}) {
    IterationGraph g = skewed_graph(f);
    auto ph = find_line_phenomenon(g);
    ASSERT_TRUE(ph) << f;
    for (const auto& line : ph->lines) EXPECT_TRUE(independent_set_check(g, line)) << f;
    const auto& a = ph->lines[ph->first];
    const auto& b = ph->lines[ph->second];
    EXPECT_TRUE(coschedulable_check(g, {a}) && coschedulable_check(g, {b})) << f;
    std::vector<Point> both = a;
    both.insert(both.end(), b.begin(), b.end());
    EXPECT_FALSE(coschedulable_check(g, {both})) << f;
  }
}

TEST(LinePhenomenon, AbsentOnChain) {
  IterationGraph g;
  g.points = {{1}, {2}, {3}};
  g.preds = {{}, {0}, {1}};
  EXPECT_FALSE(find_line_phenomenon(g));
}

TEST(Replay, MatchesSequential) {
  Stencil s = stencil(4);
  auto fronts = schedule_wavefronts(s.graph);
  Schema schema = corpus_schema("stencil4_pred.sch");
  for (std::uint64_t seed : {1, 2, 3}) {
    for (unsigned threads : {1u, 3u}) {
      ReplayReport r = replay_wavefronts(s.prog, fronts, oracle_interpretation(schema, s.params, seed), seed, threads,
                                         1000000);
      EXPECT_TRUE(r.match) << r.detail;
      EXPECT_EQ(r.compared_cells, 64u);
    }
  }
}

TEST(Replay, WrongOrderDetected) {
  Stencil s = stencil(3);
  auto fronts = schedule_wavefronts(s.graph);
  // Everything in one front: reads see the memory before the front.
  Wavefront all{0, s.graph.points};
  Schema schema = corpus_schema("stencil4_pred.sch");
  ReplayReport r = replay_wavefronts(s.prog, {all}, oracle_interpretation(schema, s.params, 5), 5, 2, 1000000);
  EXPECT_FALSE(r.match);
  EXPECT_FALSE(r.detail.empty());
}

TEST(Reports, ScheduleJsonAndCsv) {
  auto fronts = schedule_wavefronts(stencil(2).graph);
  auto j = nlohmann::json::parse(schedule_json(fronts, std::nullopt, 1));
  EXPECT_EQ(j["front_count"], fronts.size());
  EXPECT_EQ(j["fronts"][1]["size"], 2);
  EXPECT_EQ(j["fronts"][1]["members"].size(), 1u);
  EXPECT_EQ(j["fronts"][1]["members_truncated"], true);
  EXPECT_TRUE(j["hyperplane"].is_null());
  std::string csv = schedule_csv(fronts);
  EXPECT_EQ(csv.rfind("level,count\n0,1\n1,2\n", 0), 0u);
  EXPECT_EQ(iteration_str({1, -2, 3}), "(1,-2,3)");
}

}  // namespace
}  // namespace schemapar
