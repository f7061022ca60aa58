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

#include "schemapar/dependence.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "checked.hpp"
#include "lattice.hpp"

namespace schemapar {

namespace {

std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw SchemaError("bad integer '" + text + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    std::erase_if(cur, [](unsigned char c) { return std::isspace(c); });
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

Bounds parse_bounds(const std::string& text) {
  Bounds out;
  for (const auto& item : split(text, ',')) {
    auto eq = item.find('=');
    auto dots = item.find("..");
    if (eq == std::string::npos || dots == std::string::npos || dots < eq || eq == 0) {
      throw SchemaError("bad bounds entry '" + item + "' (expected name=lo..hi)");
    }
    std::int64_t lo = parse_int(item.substr(eq + 1, dots - eq - 1), "bounds");
    std::int64_t hi = parse_int(item.substr(dots + 2), "bounds");
    if (lo > hi) throw SchemaError("empty bounds for " + item.substr(0, eq));
    out[item.substr(0, eq)] = {lo, hi};
  }
  return out;
}

Params parse_params(const std::string& text) {
  Params out;
  for (const auto& item : split(text, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw SchemaError("bad parameter '" + item + "' (expected name=value)");
    out[item.substr(0, eq)] = parse_int(item.substr(eq + 1), "parameters");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Accesses and bounds
// ---------------------------------------------------------------------------

namespace {

struct Walker {
  const Schema& schema;
  std::vector<ArrayAccess> out;
  std::set<std::string> active;

  void block(const std::string& name, std::vector<std::string>& counters, std::vector<Label>& loops) {
    if (active.contains(name)) return;
    const Block* b = schema.find_block(name);
    if (!b) return;
    active.insert(name);
    for (const auto& instr : b->instructions) visit(instr, counters, loops);
    active.erase(name);
  }

  void access(const Instruction& instr, const Variable& v, bool write, const std::vector<std::string>& counters,
              const std::vector<Label>& loops) {
    if (!v.indexed()) return;
    out.push_back(ArrayAccess{instr.label, v.name, v.indexes, write, counters, loops});
  }

  void visit(const Instruction& instr, std::vector<std::string>& counters, std::vector<Label>& loops) {
    if (const auto* a = std::get_if<Assign>(&instr.op)) {
      if (const auto* ap = std::get_if<Apply>(&a->source)) {
        for (const auto& v : ap->args) access(instr, v, false, counters, loops);
      } else if (const auto* cp = std::get_if<Copy>(&a->source)) {
        access(instr, cp->source, false, counters, loops);
      }
      access(instr, a->target, true, counters, loops);
    } else if (const auto* c = std::get_if<Cond>(&instr.op)) {
      if (const auto* p = std::get_if<Predicate>(&c->test)) {
        for (const auto& v : p->args) access(instr, v, false, counters, loops);
      }
    } else if (const auto* l = std::get_if<Loop>(&instr.op)) {
      const auto* k = std::get_if<Counter>(&l->control);
      if (!k) return;
      counters.push_back(k->var);
      loops.push_back(instr.label);
      block(l->body, counters, loops);
      counters.pop_back();
      loops.pop_back();
    } else if (const auto* call = std::get_if<Call>(&instr.op)) {
      block(call->body, counters, loops);
    }
  }
};

// Smallest and largest value of an affine polynomial when every variable
// ranges over its box; nullopt if some variable is unbounded.
std::optional<std::pair<std::int64_t, std::int64_t>> range_over(const Polynomial& p, const Bounds& box) {
  if (!p.is_affine()) return std::nullopt;
  std::int64_t lo = p.constant_term(), hi = lo;
  for (const auto& v : p.variables()) {
    auto it = box.find(v);
    if (it == box.end()) return std::nullopt;
    std::int64_t c = p.coefficient(v);
    std::int64_t a = checked::mul_or_throw(c, it->second.first);
    std::int64_t b = checked::mul_or_throw(c, it->second.second);
    lo = checked::add_or_throw(lo, std::min(a, b));
    hi = checked::add_or_throw(hi, std::max(a, b));
  }
  return std::make_pair(lo, hi);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void derive_block(const Schema& schema, const std::string& name, const Params& params, Bounds& out,
                  std::set<std::string>& active) {
  if (active.contains(name)) return;
  const Block* b = schema.find_block(name);
  if (!b) return;
  active.insert(name);
  for (const auto& instr : b->instructions) {
    const std::string* body = instr.body();
    if (const auto* l = instr.as_loop()) {
      if (const auto* k = std::get_if<Counter>(&l->control)) {
        if (!out.contains(k->var)) {
          std::optional<std::int64_t> lo, hi;
          if (auto r = range_over(k->start.substitute(params), out)) lo = r->first;
          bool ok = lo.has_value();
          for (const auto& c : k->conditions) {
            // a*var + rest < 0, with rest over already bounded variables
            Polynomial d = (c.lhs - c.rhs).substitute(params);
            std::int64_t a = d.coefficient(k->var);
            Polynomial rest = d - Polynomial::constant(a) * Polynomial::variable(k->var);
            auto r = range_over(rest, out);
            if (a <= 0 || !r || rest.variables().contains(k->var)) {
              ok = false;
              break;
            }
            // a*var < -rest holds at least for var <= floor((-min(rest)-1)/a)
            std::int64_t limit = floor_div(-r->first - 1, a);
            hi = hi ? std::min(*hi, limit) : limit;
          }
          if (ok && hi) out[k->var] = {*lo, *hi};
        }
      }
    }
    if (body) derive_block(schema, *body, params, out, active);
  }
  active.erase(name);
}

}  // namespace

std::vector<ArrayAccess> collect_accesses(const Schema& schema) {
  Walker w{schema, {}, {}};
  std::vector<std::string> counters;
  std::vector<Label> loops;
  w.block(schema.main.name, counters, loops);
  return std::move(w.out);
}

Bounds derive_bounds(const Schema& schema, const Params& params, const Bounds& overrides) {
  Bounds out = overrides;
  std::set<std::string> active;
  derive_block(schema, schema.main.name, params, out, active);
  return out;
}

// ---------------------------------------------------------------------------
// Equations
// ---------------------------------------------------------------------------

namespace {

std::string index_text(const std::string& array, const std::vector<IndexExpr>& index) {
  std::string s = array + "[";
  for (std::size_t i = 0; i < index.size(); ++i) s += (i ? ", " : "") + index[i].str();
  return s + "]";
}

}  // namespace

std::string ConnectionEquation::str() const {
  return index_text(array, writer_index) + "(" + writer + "|m1) = " + index_text(array, reader_index) + "(" +
         reader + "|m2)";
}

std::vector<ConnectionEquation> build_connection_equations(const Schema& schema, const Bounds& bounds) {
  auto accesses = collect_accesses(schema);
  std::vector<ConnectionEquation> out;
  auto make = [&](const ArrayAccess& w, const ArrayAccess& r, ConnectionEquation::Kind kind, std::size_t occ) {
    ConnectionEquation eq;
    eq.kind = kind;
    eq.array = w.array;
    eq.writer = w.label;
    eq.writer_index = w.index;
    eq.reader = r.label;
    eq.reader_index = r.index;
    eq.reader_occurrence = occ;
    eq.counters = w.counters;
    for (const auto& c : w.counters) {
      auto it = bounds.find(c);
      if (it == bounds.end()) {
        eq.bounded = false;
        eq.domain.emplace_back(1, 0);
      } else {
        eq.domain.push_back(it->second);
      }
    }
    out.push_back(std::move(eq));
  };
  std::map<std::pair<Label, std::string>, std::size_t> seen_reads;
  std::vector<std::size_t> occurrence(accesses.size(), 0);
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    if (!accesses[i].write) occurrence[i] = seen_reads[{accesses[i].label, accesses[i].array}]++;
  }
  for (const auto& w : accesses) {
    if (!w.write) continue;
    for (std::size_t i = 0; i < accesses.size(); ++i) {
      const auto& r = accesses[i];
      if (r.write || r.array != w.array || r.loops != w.loops || r.index.size() != w.index.size()) continue;
      make(w, r, ConnectionEquation::Kind::Flow, occurrence[i]);
    }
  }
  for (const auto& w : accesses) {
    if (!w.write) continue;
    for (const auto& w2 : accesses) {
      if (!w2.write || w2.array != w.array || w2.loops != w.loops || w2.index.size() != w.index.size()) continue;
      make(w, w2, ConnectionEquation::Kind::Output, 0);
    }
  }
  return out;
}

std::string EquationClass::str() const {
  switch (kind) {
    case Kind::Linear:
      return "linear";
    case Kind::Polynomial:
      return "polynomial(" + std::to_string(degree) + ")";
    case Kind::General:
      return "general";
  }
  return "general";
}

EquationClass classify(const ConnectionEquation& eq, const Params& params) {
  EquationClass out;
  int degree = 1;
  std::set<std::string> counters(eq.counters.begin(), eq.counters.end());
  for (const auto* side : {&eq.writer_index, &eq.reader_index}) {
    for (const auto& e : *side) {
      if (const auto* call = e.call()) {
        out.kind = EquationClass::Kind::General;
        out.degree = 0;
        out.reason = "index function " + call->fsym + " is uninterpreted";
        return out;
      }
      Polynomial p = e.polynomial()->substitute(params);
      for (const auto& v : p.variables()) {
        if (!counters.contains(v)) {
          out.kind = EquationClass::Kind::General;
          out.degree = 0;
          out.reason = "index variable " + v + " is not a loop counter";
          return out;
        }
      }
      degree = std::max(degree, p.degree());
    }
  }
  if (degree >= 2) {
    out.kind = EquationClass::Kind::Polynomial;
  }
  out.degree = degree;
  return out;
}

std::string to_string(SolutionSet::Kind kind) {
  switch (kind) {
    case SolutionSet::Kind::Empty:
      return "empty";
    case SolutionSet::Kind::Enumerated:
      return "enumerated";
    case SolutionSet::Kind::Parametric:
      return "parametric";
    case SolutionSet::Kind::Unknown:
      return "unknown";
  }
  return "unknown";
}

SolutionSet solve_linear(const ConnectionEquation& eq, const SolveOptions& options) {
  EquationClass cls = classify(eq, options.params);
  if (cls.kind != EquationClass::Kind::Linear) {
    throw SchemaError("equation " + eq.str() + " is " + cls.str() + ", not linear");
  }
  const std::size_t n = eq.counters.size();
  lattice::Mat a;
  lattice::Vec b;
  // W_d(m1) - R_d(m2) = 0  <=>  sum(w*m1) - sum(r*m2) = R0 - W0
  for (std::size_t d = 0; d < eq.writer_index.size(); ++d) {
    Polynomial w = eq.writer_index[d].polynomial()->substitute(options.params);
    Polynomial r = eq.reader_index[d].polynomial()->substitute(options.params);
    lattice::Vec row(2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = w.coefficient(eq.counters[i]);
      row[n + i] = -r.coefficient(eq.counters[i]);
    }
    a.push_back(std::move(row));
    b.push_back(checked::sub_or_throw(r.constant_term(), w.constant_term()));
  }

  SolutionSet out;
  lattice::Solution sol;
  try {
    sol = lattice::solve(a, b, 2 * n);
  } catch (const std::overflow_error&) {
    out.kind = SolutionSet::Kind::Unknown;
    out.note = "coefficients too large";
    return out;
  }
  if (sol.empty) {
    out.kind = SolutionSet::Kind::Empty;
    out.note = "no integer solution";
    return out;
  }
  out.particular = sol.particular;
  out.generators = sol.generators;
  if (!eq.bounded) {
    out.kind = SolutionSet::Kind::Parametric;
    out.note = "no bounds";
    return out;
  }
  lattice::Vec lo(2 * n), hi(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = lo[n + i] = eq.domain[i].first;
    hi[i] = hi[n + i] = eq.domain[i].second;
  }
  bool complete = lattice::enumerate(sol, lo, hi, options.cap, [&](const lattice::Vec& x) {
    IterationVector m1(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    IterationVector m2(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
    if (options.forward_only && !(m1 < m2)) return;
    out.pairs.emplace(std::move(m1), std::move(m2));
  });
  if (!complete) {
    out.pairs.clear();
    out.kind = SolutionSet::Kind::Parametric;
    out.note = "enumeration cap exceeded";
    throw CapExceeded("more than " + std::to_string(options.cap) + " candidates for " + eq.str(), out);
  }
  out.kind = SolutionSet::Kind::Enumerated;
  return out;
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

namespace {

struct Log {
  std::set<DependenceEdge> edges;
  std::set<Step> steps;
};

Log run_logged(const Schema& schema, const Interpretation& interp, const RunOptions& options) {
  Log log;
  std::map<CellKey, std::vector<Step>> writers;
  RunOptions opts = options;
  auto outer = options.observer;
  opts.observer = [&](const AccessEvent& e) {
    if (outer) outer(e);
    log.steps.insert(e.step);
    auto& ws = writers[e.cell];
    auto kind = e.kind == AccessEvent::Kind::Read ? DependenceEdge::Kind::Flow : DependenceEdge::Kind::Output;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      log.edges.insert(DependenceEdge{ws[i], e.step, e.cell, kind, i + 1 == ws.size()});
    }
    if (e.kind == AccessEvent::Kind::Write) ws.push_back(e.step);
  };
  Outcome o = run(schema, interp, opts);
  if (o.status != Status::Final) {
    throw SchemaError("oracle run stopped: " + to_string(o.status) + (o.reason.empty() ? "" : " (" + o.reason + ")"));
  }
  return log;
}

}  // namespace

std::set<DependenceEdge> brute_force_dependences(const Schema& schema, const Interpretation& interp,
                                                 const RunOptions& options) {
  return run_logged(schema, interp, options).edges;
}

bool ComparisonReport::match() const { return mismatches() == 0; }

std::size_t ComparisonReport::mismatches() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.only_solver.size() + p.only_oracle.size();
  return n;
}

ComparisonReport solver_vs_oracle(const Schema& schema, const Bounds& bounds, const Interpretation& interp,
                                  const SolveOptions& options, std::uint64_t fuel) {
  auto equations = build_connection_equations(schema, bounds);
  for (const auto& eq : equations) {
    EquationClass c = classify(eq, options.params);
    if (c.kind != EquationClass::Kind::Linear) {
      throw NotComparable("equation " + eq.str() + " is " + c.str() +
                          (c.reason.empty() ? "" : " (" + c.reason + ")"));
    }
    if (!eq.bounded) throw NotComparable("equation " + eq.str() + " has an unbounded counter");
  }
  RunOptions ro;
  ro.fuel = fuel;
  Log log = run_logged(schema, interp, ro);

  using Key = std::tuple<Label, Label, std::string>;
  std::map<Key, std::set<std::pair<IterationVector, IterationVector>>> solver, oracle;
  std::map<Key, std::size_t> depth;
  SolveOptions forward = options;
  forward.forward_only = true;
  for (const auto& eq : equations) {
    if (eq.kind != ConnectionEquation::Kind::Flow) continue;
    Key key{eq.writer, eq.reader, eq.array};
    depth[key] = eq.counters.size();
    auto& dst = solver[key];
    for (const auto& [m1, m2] : solve_linear(eq, forward).pairs) {
      if (log.steps.contains(Step{eq.writer, m1}) && log.steps.contains(Step{eq.reader, m2})) dst.emplace(m1, m2);
    }
  }
  for (const auto& e : log.edges) {
    if (e.kind != DependenceEdge::Kind::Flow || !e.cell.indexed()) continue;
    Key key{e.producer.label, e.consumer.label, e.cell.name};
    auto it = depth.find(key);
    if (it == depth.end()) continue;
    if (e.producer.iteration.size() != it->second || e.producer.iteration == e.consumer.iteration) continue;
    oracle[key].emplace(e.producer.iteration, e.consumer.iteration);
  }
  ComparisonReport report;
  for (const auto& [key, _] : depth) {
    PairComparison pc;
    std::tie(pc.writer, pc.reader, pc.array) = key;
    const auto& s = solver[key];
    const auto& o = oracle[key];
    pc.solver = s.size();
    pc.oracle = o.size();
    std::set_difference(s.begin(), s.end(), o.begin(), o.end(), std::back_inserter(pc.only_solver));
    std::set_difference(o.begin(), o.end(), s.begin(), s.end(), std::back_inserter(pc.only_oracle));
    report.pairs.push_back(std::move(pc));
  }
  return report;
}

Interpretation oracle_interpretation(const Schema& schema, const Params& params, std::uint64_t seed) {
  Interpretation interp = random_interpretation(schema, seed);
  for (const auto& [name, value] : params) interp.start[CellKey::simple(name)] = Term::integer(value);
  return interp;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json step_json(const Step& s) {
  return nlohmann::json{{"label", s.label}, {"iter", s.iteration}};
}

std::string kind_name(DependenceEdge::Kind k) { return k == DependenceEdge::Kind::Flow ? "flow" : "output"; }

}  // namespace

std::string dependence_json_lines(const std::set<DependenceEdge>& edges) {
  std::vector<std::string> lines;
  for (const auto& e : edges) {
    nlohmann::json j{{"producer", step_json(e.producer)},
                     {"consumer", step_json(e.consumer)},
                     {"array", e.cell.name},
                     {"cell", e.cell.str()},
                     {"kind", kind_name(e.kind)},
                     {"immediate", e.immediate}};
    lines.push_back(j.dump());
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string dependence_dot(const std::set<DependenceEdge>& edges) {
  std::set<std::string> nodes;
  for (const auto& e : edges) {
    nodes.insert(e.producer.str());
    nodes.insert(e.consumer.str());
  }
  std::ostringstream out;
  out << "digraph dependences {\n  node [shape=box];\n";
  for (const auto& n : nodes) out << "  \"" << n << "\";\n";
  for (const auto& e : edges) {
    out << "  \"" << e.producer.str() << "\" -> \"" << e.consumer.str() << "\" [label=\"" << e.cell.str() << "\"";
    if (e.kind == DependenceEdge::Kind::Output) out << ", color=red";
    if (!e.immediate) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace schemapar
