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

#include "schemapar/parallel.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "checked.hpp"

namespace schemapar {

std::string iteration_str(const IterationVector& it) {
  std::string s = "(";
  for (std::size_t i = 0; i < it.size(); ++i) s += (i ? "," : "") + std::to_string(it[i]);
  return s + ")";
}

std::string PredecessorRead::str() const {
  std::string s = array + "[";
  for (std::size_t i = 0; i < target.size(); ++i) s += (i ? ", " : "") + target[i].str();
  return s + "]";
}

// ---------------------------------------------------------------------------
// Program extraction
// ---------------------------------------------------------------------------

namespace {

std::vector<Polynomial> affine_target(const Variable& v, const Label& at) {
  std::vector<Polynomial> out;
  for (const auto& e : v.indexes) {
    const Polynomial* p = e.polynomial();
    if (!p || !p->is_affine()) {
      throw SchemaError("read " + v.str() + " at " + at + " is not affine in the counters");
    }
    out.push_back(*p);
  }
  return out;
}

}  // namespace

PredecessorProgram predecessor_program(const Schema& schema) {
  if (!schema.predecessor_semantics) throw SchemaError("schema does not use predecessor semantics");
  PredecessorProgram prog;
  prog.schema = schema;
  const Block* b = &schema.main;
  for (;;) {
    if (b->instructions.size() == 1 && b->instructions.front().as_loop() &&
        std::holds_alternative<Counter>(b->instructions.front().as_loop()->control)) {
      const Instruction& i = b->instructions.front();
      prog.nest.push_back(NestLevel{i.label, std::get<Counter>(i.as_loop()->control)});
      b = &schema.block(i.as_loop()->body);
      continue;
    }
    break;
  }
  if (prog.nest.empty()) throw SchemaError("expected a single nest of counted loops");
  prog.body = b->name;
  for (const auto& i : b->instructions) {
    const auto* a = i.as_assign();
    if (!a) throw SchemaError("instruction " + i.label + " of the innermost body is not an assignment");
    if (a->target.indexed()) {
      throw SchemaError("instruction " + i.label + " names an index on the left side");
    }
    prog.arrays.insert(a->target.name);
  }
  for (const auto& i : b->instructions) {
    const auto* a = i.as_assign();
    PredecessorStatement st{i.label, a->target.name, {}};
    std::vector<const Variable*> vars;
    if (const auto* ap = std::get_if<Apply>(&a->source)) {
      for (const auto& v : ap->args) vars.push_back(&v);
    } else if (const auto* cp = std::get_if<Copy>(&a->source)) {
      vars.push_back(&cp->source);
    }
    for (const auto* v : vars) {
      if (!v->indexed() || !prog.arrays.contains(v->name)) continue;
      if (v->indexes.size() != prog.nest.size()) {
        throw SchemaError("read " + v->str() + " at " + i.label + " does not name an iteration of the nest");
      }
      st.reads.push_back(PredecessorRead{v->name, affine_target(*v, i.label)});
    }
    prog.statements.push_back(std::move(st));
  }
  return prog;
}

std::vector<IterationVector> iteration_domain(const PredecessorProgram& prog, const Params& params,
                                              const Bounds& overrides) {
  std::vector<IterationVector> out;
  IterationVector cur;
  std::map<std::string, std::int64_t> env = params;
  std::function<void(std::size_t)> rec = [&](std::size_t level) {
    if (level == prog.nest.size()) {
      out.push_back(cur);
      return;
    }
    const Counter& k = prog.nest[level].counter;
    auto lookup = [&](const std::string& n) -> std::optional<std::int64_t> {
      auto it = env.find(n);
      if (it == env.end()) return std::nullopt;
      return it->second;
    };
    std::int64_t lo = 0;
    std::optional<std::int64_t> hi;
    if (auto ov = overrides.find(k.var); ov != overrides.end()) {
      lo = ov->second.first;
      hi = ov->second.second;
    } else {
      auto s = k.start.evaluate(lookup);
      if (!s) throw SchemaError("cannot evaluate the start of " + k.var + " (missing parameter?)");
      lo = *s;
    }
    for (std::int64_t v = lo;; ++v) {
      if (hi && v > *hi) break;
      env[k.var] = v;
      if (!hi) {
        bool inside = true;
        for (const auto& c : k.conditions) {
          auto l = c.lhs.evaluate(lookup), r = c.rhs.evaluate(lookup);
          if (!l || !r) throw SchemaError("cannot evaluate the bounds of " + k.var + " (missing parameter?)");
          if (!(*l < *r)) inside = false;
        }
        if (!inside) break;
      }
      cur.push_back(v);
      rec(level + 1);
      cur.pop_back();
    }
    env.erase(k.var);
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

std::optional<std::size_t> IterationGraph::find(const IterationVector& p) const {
  auto it = std::lower_bound(points.begin(), points.end(), p);
  if (it == points.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - points.begin());
}

std::size_t IterationGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : preds) n += p.size();
  return n;
}

namespace {

IterationVector evaluate_target(const PredecessorProgram& prog, const PredecessorRead& r, const IterationVector& at,
                                const Params& params) {
  std::map<std::string, std::int64_t> env = params;
  for (std::size_t i = 0; i < prog.nest.size(); ++i) env[prog.nest[i].counter.var] = at[i];
  IterationVector out;
  for (const auto& p : r.target) {
    auto v = p.evaluate([&](const std::string& n) -> std::optional<std::int64_t> {
      auto it = env.find(n);
      if (it == env.end()) return std::nullopt;
      return it->second;
    });
    if (!v) throw SchemaError("cannot evaluate " + r.str() + " at " + iteration_str(at));
    out.push_back(*v);
  }
  return out;
}

}  // namespace

IterationGraph build_graph(const PredecessorProgram& prog, const std::vector<IterationVector>& domain,
                           const Params& params) {
  IterationGraph g;
  g.points = domain;
  std::sort(g.points.begin(), g.points.end());
  g.points.erase(std::unique(g.points.begin(), g.points.end()), g.points.end());
  g.preds.resize(g.points.size());
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    std::set<std::size_t> ps;
    for (const auto& st : prog.statements) {
      for (const auto& r : st.reads) {
        if (auto j = g.find(evaluate_target(prog, r, g.points[i], params)); j && *j != i) ps.insert(*j);
      }
    }
    g.preds[i].assign(ps.begin(), ps.end());
  }
  return g;
}

IterationGraph dependence_graph(const Schema& schema, const Interpretation& interp, std::size_t depth,
                                std::uint64_t fuel) {
  std::set<IterationVector> points;
  RunOptions options;
  options.fuel = fuel;
  options.observer = [&](const AccessEvent& e) {
    if (e.step.iteration.size() == depth) points.insert(e.step.iteration);
  };
  auto edges = brute_force_dependences(schema, interp, options);
  IterationGraph g;
  g.points.assign(points.begin(), points.end());
  std::vector<std::set<std::size_t>> preds(g.points.size());
  for (const auto& e : edges) {
    if (e.kind != DependenceEdge::Kind::Flow || !e.immediate) continue;
    if (e.producer.iteration.size() != depth || e.consumer.iteration.size() != depth) continue;
    if (e.producer.iteration == e.consumer.iteration) continue;
    preds[*g.find(e.consumer.iteration)].insert(*g.find(e.producer.iteration));
  }
  for (const auto& p : preds) g.preds.emplace_back(p.begin(), p.end());
  return g;
}

std::vector<PredecessorViolation> validate_predecessors(const PredecessorProgram& prog,
                                                        const std::vector<IterationVector>& domain,
                                                        const Params& params) {
  std::set<IterationVector> box(domain.begin(), domain.end());
  std::vector<PredecessorViolation> out;
  for (const auto& p : domain) {
    for (const auto& st : prog.statements) {
      for (const auto& r : st.reads) {
        IterationVector t = evaluate_target(prog, r, p, params);
        if (box.contains(t) && !(t < p)) out.push_back({p, st.label, r.str(), t});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

std::vector<Wavefront> schedule_wavefronts(const IterationGraph& graph) {
  const std::size_t n = graph.points.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> waiting(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    waiting[i] = graph.preds[i].size();
    for (auto p : graph.preds[i]) succ[p].push_back(i);
  }
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (waiting[i] == 0) frontier.push_back(i);
  }
  std::vector<Wavefront> out;
  std::size_t placed = 0;
  while (!frontier.empty()) {
    Wavefront w;
    w.level = out.size();
    std::vector<std::size_t> next;
    for (auto i : frontier) {
      w.iterations.push_back(graph.points[i]);
      for (auto s : succ[i]) {
        if (--waiting[s] == 0) next.push_back(s);
      }
    }
    placed += frontier.size();
    std::sort(w.iterations.begin(), w.iterations.end());
    out.push_back(std::move(w));
    frontier = std::move(next);
  }
  if (placed != n) {
    throw CycleDetected(std::to_string(n - placed) + " iterations wait on each other");
  }
  return out;
}

Cone cone_of(const IterationGraph& graph, const IterationVector& apex) {
  auto a = graph.find(apex);
  if (!a) throw SchemaError("iteration " + iteration_str(apex) + " is outside the domain");
  Cone c{apex, {}};
  std::vector<bool> seen(graph.points.size(), false);
  std::deque<std::size_t> work(graph.preds[*a].begin(), graph.preds[*a].end());
  while (!work.empty()) {
    auto u = work.front();
    work.pop_front();
    if (seen[u]) continue;
    seen[u] = true;
    c.members.insert(graph.points[u]);
    for (auto p : graph.preds[u]) {
      if (!seen[p]) work.push_back(p);
    }
  }
  return c;
}

bool independent_set_check(const IterationGraph& graph, const std::vector<IterationVector>& points) {
  std::set<IterationVector> members(points.begin(), points.end());
  for (const auto& p : members) {
    Cone c = cone_of(graph, p);
    for (const auto& q : members) {
      if (q != p && c.members.contains(q)) return false;
    }
  }
  return true;
}

bool coschedulable_check(const IterationGraph& graph, const std::vector<std::vector<IterationVector>>& sets) {
  std::map<std::size_t, std::size_t> set_of;
  for (std::size_t t = 0; t < sets.size(); ++t) {
    for (const auto& p : sets[t]) {
      auto i = graph.find(p);
      if (!i) throw SchemaError("iteration " + iteration_str(p) + " is outside the domain");
      set_of[*i] = t;
    }
  }
  for (const auto& [i, t] : set_of) {
    for (auto q : graph.preds[i]) {
      auto it = set_of.find(q);
      if (it != set_of.end() && it->second >= t) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Hyperplanes
// ---------------------------------------------------------------------------

std::vector<IterationVector> distance_vectors(const PredecessorProgram& prog, const Params& params) {
  std::set<IterationVector> out;
  for (const auto& st : prog.statements) {
    for (const auto& r : st.reads) {
      IterationVector d;
      for (std::size_t i = 0; i < prog.nest.size(); ++i) {
        Polynomial p = r.target[i].substitute(params);
        const std::string& own = prog.nest[i].counter.var;
        Polynomial rest = p - Polynomial::variable(own);
        if (p.coefficient(own) != 1 || !rest.is_constant()) {
          throw NonConstantDistances("read " + r.str() + " at " + st.label + " has no constant distance");
        }
        d.push_back(-rest.constant_term());
      }
      out.insert(std::move(d));
    }
  }
  return {out.begin(), out.end()};
}

std::optional<IterationVector> find_normal(const std::vector<IterationVector>& distances, int cap) {
  if (distances.empty()) return std::nullopt;
  const std::size_t n = distances.front().size();
  std::optional<IterationVector> best;
  std::tuple<std::int64_t, std::int64_t> best_key{0, 0};
  IterationVector h(n, -cap);
  for (;;) {
    bool ok = true;
    for (const auto& d : distances) {
      std::int64_t dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += h[i] * d[i];
      if (dot < 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::int64_t mx = 0, sum = 0;
      for (auto v : h) {
        mx = std::max<std::int64_t>(mx, std::abs(v));
        sum += std::abs(v);
      }
      std::tuple<std::int64_t, std::int64_t> key{mx, sum};
      if (!best || key < best_key) {
        best = h;
        best_key = key;
      }
    }
    // Odometer over [-cap, cap]^n in lexicographic order.
    std::size_t i = n;
    while (i > 0 && h[i - 1] == cap) {
      h[i - 1] = -cap;
      --i;
    }
    if (i == 0) break;
    ++h[i - 1];
  }
  return best;
}

std::vector<std::vector<IterationVector>> hyperplane_sets(const IterationGraph& graph, const IterationVector& normal) {
  std::map<std::int64_t, std::vector<IterationVector>> planes;
  for (const auto& p : graph.points) {
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < normal.size(); ++i) dot = checked::add_or_throw(dot, checked::mul_or_throw(normal[i], p[i]));
    planes[dot].push_back(p);
  }
  std::vector<std::vector<IterationVector>> out;
  for (auto& [_, pts] : planes) out.push_back(std::move(pts));
  return out;
}

std::optional<Hyperplane> find_hyperplane(const PredecessorProgram& prog, const IterationGraph& graph,
                                          const Params& params, int cap) {
  auto distances = distance_vectors(prog, params);
  Hyperplane h;
  if (distances.empty()) {
    h.normal.assign(prog.nest.size(), 0);
  } else {
    auto n = find_normal(distances, cap);
    if (!n) return std::nullopt;
    h.normal = *n;
  }
  bool any = false;
  for (const auto& p : graph.points) {
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < h.normal.size(); ++i) dot += h.normal[i] * p[i];
    h.first = any ? std::min(h.first, dot) : dot;
    h.last = any ? std::max(h.last, dot) : dot;
    any = true;
  }
  h.verified = coschedulable_check(graph, hyperplane_sets(graph, h.normal));
  return h;
}

// ---------------------------------------------------------------------------
// Lines
// ---------------------------------------------------------------------------

std::optional<LinePhenomenon> find_line_phenomenon(const IterationGraph& graph, int cap) {
  const std::size_t n = graph.points.empty() ? 0 : graph.points.front().size();
  const std::size_t m = graph.points.size();
  if (n == 0) return std::nullopt;

  // cone[i][j]: j is in the cone of i.
  std::vector<std::vector<bool>> cone(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& q : cone_of(graph, graph.points[i]).members) cone[i][*graph.find(q)] = true;
  }
  std::vector<std::int64_t> low(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    low[c] = graph.points.front()[c];
    for (const auto& p : graph.points) low[c] = std::min(low[c], p[c]);
  }

  IterationVector d(n, -cap);
  for (;;) {
    std::size_t lead = 0;
    while (lead < n && d[lead] == 0) ++lead;
    if (lead < n && d[lead] > 0) {
      // Canonical representative of each line: shift along d until the
      // leading coordinate falls into [low, low + d[lead]).
      std::map<IterationVector, std::vector<std::size_t>> lines;
      for (std::size_t i = 0; i < m; ++i) {
        const auto& p = graph.points[i];
        std::int64_t diff = p[lead] - low[lead];
        std::int64_t t = diff >= 0 ? diff / d[lead] : -((-diff + d[lead] - 1) / d[lead]);
        IterationVector key(n);
        for (std::size_t c = 0; c < n; ++c) key[c] = p[c] - t * d[c];
        lines[key].push_back(i);
      }
      std::vector<std::vector<std::size_t>> ls;
      std::size_t longest = 0;
      for (auto& [_, l] : lines) {
        longest = std::max(longest, l.size());
        ls.push_back(std::move(l));
      }
      bool independent = longest >= 2;
      for (const auto& l : ls) {
        for (auto a : l) {
          for (auto b : l) {
            if (a != b && cone[a][b]) independent = false;
          }
        }
        if (!independent) break;
      }
      if (independent) {
        std::vector<std::size_t> line_of(m);
        for (std::size_t k = 0; k < ls.size(); ++k) {
          for (auto i : ls[k]) line_of[i] = k;
        }
        // Two lines fail as one set iff a member of one directly needs a
        // member of the other.
        std::optional<std::pair<std::size_t, std::size_t>> bad;
        for (std::size_t i = 0; i < m && !bad; ++i) {
          for (auto p : graph.preds[i]) {
            if (line_of[p] != line_of[i]) {
              bad = std::minmax(line_of[p], line_of[i]);
              break;
            }
          }
        }
        if (bad) {
          LinePhenomenon out;
          out.direction = d;
          for (const auto& l : ls) {
            std::vector<IterationVector> pts;
            for (auto i : l) pts.push_back(graph.points[i]);
            out.lines.push_back(std::move(pts));
          }
          out.first = bad->first;
          out.second = bad->second;
          return out;
        }
      }
    }
    std::size_t i = n;
    while (i > 0 && d[i - 1] == cap) {
      d[i - 1] = -cap;
      --i;
    }
    if (i == 0) break;
    ++d[i - 1];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

namespace {

Memory produced_cells(const Memory& m, const std::set<std::string>& arrays) {
  Memory out;
  for (const auto& [k, v] : m) {
    if (k.indexed() && arrays.contains(k.name)) out.emplace(k, v);
  }
  return out;
}

}  // namespace

ReplayReport replay_wavefronts(const PredecessorProgram& prog, const std::vector<Wavefront>& fronts,
                               const Interpretation& interp, std::uint64_t seed, unsigned threads,
                               std::uint64_t fuel) {
  ReplayReport report;
  report.fronts = fronts.size();
  Outcome seq = run(prog.schema, interp, fuel);
  if (seq.status != Status::Final) {
    report.detail = "sequential run: " + to_string(seq.status) + " " + seq.reason;
    return report;
  }
  report.sequential = produced_cells(seq.memory, prog.arrays);

  Memory committed = interp.start;
  std::mt19937_64 rng(seed);
  threads = std::max(1u, threads);
  RunOptions options;
  options.fuel = fuel;
  for (const auto& front : fronts) {
    std::vector<IterationVector> order = front.iterations;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Memory> writes(order.size());
    std::vector<std::string> errors(order.size());
    auto work = [&](std::size_t from, std::size_t step) {
      for (std::size_t i = from; i < order.size(); i += step) {
        Memory snapshot = committed;
        for (std::size_t c = 0; c < prog.nest.size(); ++c) {
          snapshot[CellKey::simple(prog.nest[c].counter.var)] = Term::integer(order[i][c]);
        }
        std::set<CellKey> written;
        RunOptions o = options;
        o.observer = [&](const AccessEvent& e) {
          if (e.kind == AccessEvent::Kind::Write) written.insert(e.cell);
        };
        Outcome out = run_block(prog.schema, interp, prog.body, std::move(snapshot), order[i], o);
        if (out.status != Status::Final) {
          errors[i] = iteration_str(order[i]) + ": " + to_string(out.status) + " " + out.reason;
          continue;
        }
        for (const auto& c : written) writes[i][c] = out.memory.at(c);
      }
    };
    std::vector<std::thread> pool;
    unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, order.size())));
    for (unsigned t = 1; t < used; ++t) pool.emplace_back(work, t, used);
    work(0, used);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (!errors[i].empty()) {
        report.detail = errors[i];
        return report;
      }
      for (auto& [c, v] : writes[i]) committed[c] = v;
    }
  }
  report.parallel = produced_cells(committed, prog.arrays);
  report.compared_cells = report.sequential.size();
  report.match = report.sequential == report.parallel;
  if (!report.match) {
    for (const auto& [k, v] : report.sequential) {
      auto it = report.parallel.find(k);
      if (it == report.parallel.end() || it->second != v) {
        report.detail = "cell " + k.str() + " differs";
        break;
      }
    }
    if (report.detail.empty()) report.detail = "parallel replay produced extra cells";
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string schedule_json(const std::vector<Wavefront>& fronts, const std::optional<Hyperplane>& plane,
                          std::size_t member_cap) {
  nlohmann::json j;
  j["front_count"] = fronts.size();
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : fronts) {
    nlohmann::json e{{"level", f.level}, {"size", f.iterations.size()}};
    if (member_cap > 0) {
      nlohmann::json members = nlohmann::json::array();
      for (std::size_t i = 0; i < f.iterations.size() && i < member_cap; ++i) members.push_back(f.iterations[i]);
      e["members"] = members;
      e["members_truncated"] = f.iterations.size() > member_cap;
    }
    list.push_back(e);
  }
  j["fronts"] = list;
  if (plane) {
    j["hyperplane"] = {{"normal", plane->normal},
                       {"first", plane->first},
                       {"last", plane->last},
                       {"verified", plane->verified}};
  } else {
    j["hyperplane"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string schedule_csv(const std::vector<Wavefront>& fronts) {
  std::ostringstream out;
  out << "level,count\n";
  for (const auto& f : fronts) out << f.level << "," << f.iterations.size() << "\n";
  return out.str();
}

}  // namespace schemapar
