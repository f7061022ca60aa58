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

#include "schemapar/normalize.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "schemapar/interpreter.hpp"
#include "schemapar/var_sets.hpp"

namespace schemapar {

namespace {

// Successor lists of the instructions of one block, by position. Outputs to
// the final label (or to unknown labels) are not edges.
struct BlockGraph {
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::vector<std::size_t>> pred;
  std::map<Label, std::size_t> pos;

  explicit BlockGraph(const Block& b) : succ(b.instructions.size()), pred(b.instructions.size()) {
    for (std::size_t i = 0; i < b.instructions.size(); ++i) pos.emplace(b.instructions[i].label, i);
    for (std::size_t i = 0; i < b.instructions.size(); ++i) {
      for (const auto& o : b.instructions[i].outputs()) {
        auto it = pos.find(o);
        if (it == pos.end()) continue;
        if (std::find(succ[i].begin(), succ[i].end(), it->second) == succ[i].end()) {
          succ[i].push_back(it->second);
          pred[it->second].push_back(i);
        }
      }
    }
  }

  std::size_t size() const { return succ.size(); }

  // Back edges (u -> v) of a DFS started at the first instruction, then at
  // every still-unvisited instruction in block order.
  std::vector<std::pair<std::size_t, std::size_t>> back_edges() const {
    std::vector<int> state(size(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::function<void(std::size_t)> dfs = [&](std::size_t u) {
      state[u] = 1;
      for (auto v : succ[u]) {
        if (state[v] == 1) {
          out.emplace_back(u, v);
        } else if (state[v] == 0) {
          dfs(v);
        }
      }
      state[u] = 2;
    };
    for (std::size_t s = 0; s < size(); ++s) {
      if (state[s] == 0) dfs(s);
    }
    return out;
  }

  // Instructions reachable from the first one, in a topological order.
  // Requires acyclicity.
  std::vector<std::size_t> topo_reachable() const {
    std::vector<std::size_t> order;
    if (size() == 0) return order;
    std::vector<bool> seen(size(), false);
    std::function<void(std::size_t)> dfs = [&](std::size_t u) {
      seen[u] = true;
      for (auto v : succ[u]) {
        if (!seen[v]) dfs(v);
      }
      order.push_back(u);
    };
    dfs(0);
    std::reverse(order.begin(), order.end());
    return order;
  }

  // Instructions reachable from `from` by at least one edge.
  std::set<std::size_t> after(std::size_t from) const {
    std::set<std::size_t> out;
    std::vector<std::size_t> work(succ[from].begin(), succ[from].end());
    while (!work.empty()) {
      auto u = work.back();
      work.pop_back();
      if (!out.insert(u).second) continue;
      for (auto v : succ[u]) work.push_back(v);
    }
    return out;
  }
};

std::map<std::string, std::set<std::string>> call_graph(const Schema& schema) {
  std::map<std::string, std::set<std::string>> g;
  for (const auto* b : schema.blocks()) {
    auto& out = g[b->name];
    for (const auto& i : b->instructions) {
      if (const auto* body = i.body()) out.insert(*body);
    }
  }
  return g;
}

std::set<std::string> recursive_procs(const Schema& schema) {
  auto g = call_graph(schema);
  std::set<std::string> out;
  for (const auto& [name, direct] : g) {
    std::set<std::string> seen;
    std::vector<std::string> work(direct.begin(), direct.end());
    while (!work.empty()) {
      std::string u = work.back();
      work.pop_back();
      if (!seen.insert(u).second) continue;
      if (auto it = g.find(u); it != g.end()) work.insert(work.end(), it->second.begin(), it->second.end());
    }
    if (seen.contains(name)) out.insert(name);
  }
  return out;
}

Block& mutable_block(Schema& s, const std::string& name) {
  if (name == s.main.name) return s.main;
  return s.procs.at(name);
}

}  // namespace

// ---------------------------------------------------------------------------
// L-schemas
// ---------------------------------------------------------------------------

std::vector<LViolation> check_l_schema(const Schema& schema) {
  std::vector<LViolation> out;
  for (const auto* b : schema.blocks()) {
    BlockGraph g(*b);
    for (auto [u, v] : g.back_edges()) {
      const Label& from = b->instructions[u].label;
      const Label& to = b->instructions[v].label;
      out.push_back({LViolation::Kind::LabelOrder, b->name, from,
                     "label order violation at " + from + " (jumps back to " + to + ")"});
    }
  }
  for (const auto& p : recursive_procs(schema)) {
    out.push_back({LViolation::Kind::Recursion, p, "", "recursive procedure " + p});
  }
  return out;
}

Schema to_l_schema(const Schema& schema) {
  auto rec = recursive_procs(schema);
  if (!rec.empty()) {
    throw RecursionUnsupported("recursive procedure " + *rec.begin() + " cannot be normalized");
  }
  Schema out = schema;
  NameGen names(schema);
  std::vector<std::string> to_fix;
  for (const auto* b : schema.blocks()) {
    if (!BlockGraph(*b).back_edges().empty()) to_fix.push_back(b->name);
  }
  for (const auto& name : to_fix) {
    Block& b = mutable_block(out, name);
    std::string pc = names.program_counter();
    out.aux.insert(pc);
    Label init = names.label();
    Label loop = names.label();
    Label body_final = names.label();

    Block body;
    body.name = inline_body_name(loop);
    body.inline_body = true;
    body.final_label = body_final;

    // Dispatch chain: one test per instruction except the last, which is the
    // fall-through.
    std::vector<Label> chain;
    for (std::size_t i = 0; i + 1 < b.instructions.size(); ++i) chain.push_back(names.label());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const Label& target = b.instructions[i].label;
      Label otherwise = i + 1 < chain.size() ? chain[i + 1] : b.instructions.back().label;
      body.instructions.push_back(
          Instruction{chain[i], Cond{LabelTest{pc, target, true}, target, otherwise}});
    }
    std::map<Label, Label> setter;
    std::vector<Label> setter_order;
    for (auto instr : b.instructions) {
      instr.remap_outputs([&](const Label& o) {
        auto [it, fresh] = setter.emplace(o, "");
        if (fresh) {
          it->second = names.label();
          setter_order.push_back(o);
        }
        return it->second;
      });
      body.instructions.push_back(std::move(instr));
    }
    for (const auto& o : setter_order) {
      body.instructions.push_back(
          Instruction{setter[o], Assign{Variable::simple(pc), LabelConst{o}, body_final}});
    }

    Label start = b.start_label();
    std::vector<Instruction> outer;
    outer.push_back(Instruction{init, Assign{Variable::simple(pc), LabelConst{start}, loop}});
    outer.push_back(Instruction{loop, Loop{body.name, LabelTest{pc, b.final_label, false}, b.final_label}});
    b.instructions = std::move(outer);
    out.procs.emplace(body.name, std::move(body));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward orientation
// ---------------------------------------------------------------------------

namespace {

std::vector<ForwardViolation> block_violations(const Schema& schema, const Block& b) {
  std::vector<ForwardViolation> out;
  BlockGraph g(b);
  std::vector<VarSets> sets;
  for (const auto& i : b.instructions) sets.push_back(var_sets(schema, i));
  for (std::size_t s1 = 0; s1 < b.instructions.size(); ++s1) {
    auto later = g.after(s1);
    for (const auto& e : names_of(sets[s1].ind)) {
      for (auto s2 : later) {
        if (s2 == s1) continue;
        if (simple_names(sets[s2].val).contains(e)) {
          out.push_back({b.name, b.instructions[s1].label, b.instructions[s2].label, e});
          break;
        }
      }
    }
  }
  return out;
}

IndexExpr rename_index(const IndexExpr& e, const std::string& from, const std::string& to) {
  return e.rename(from, to);
}

Variable rename_in_indexes(Variable v, const std::string& from, const std::string& to) {
  for (auto& e : v.indexes) e = rename_index(e, from, to);
  return v;
}

void rename_vars(std::vector<Variable>& vs, const std::string& from, const std::string& to) {
  for (auto& v : vs) v = rename_in_indexes(v, from, to);
}

void rename_block_indexes(Schema& s, const std::string& block, const std::string& from,
                          const std::string& to);

// Renames `from` in every index position of the instruction (and, for
// inline bodies, of everything nested inside).
void rename_instruction_indexes(Schema& s, Instruction& instr, const std::string& from,
                                const std::string& to) {
  if (auto* a = std::get_if<Assign>(&instr.op)) {
    a->target = rename_in_indexes(a->target, from, to);
    if (auto* ap = std::get_if<Apply>(&a->source)) rename_vars(ap->args, from, to);
    if (auto* cp = std::get_if<Copy>(&a->source)) cp->source = rename_in_indexes(cp->source, from, to);
  } else if (auto* c = std::get_if<Cond>(&instr.op)) {
    if (auto* p = std::get_if<Predicate>(&c->test)) rename_vars(p->args, from, to);
  } else {
    if (auto* l = std::get_if<Loop>(&instr.op)) {
      if (auto* p = std::get_if<Predicate>(&l->control)) rename_vars(p->args, from, to);
    }
    rename_block_indexes(s, *instr.body(), from, to);
  }
}

void rename_block_indexes(Schema& s, const std::string& block, const std::string& from,
                          const std::string& to) {
  Block& b = mutable_block(s, block);
  for (auto& i : b.instructions) rename_instruction_indexes(s, i, from, to);
}

}  // namespace

std::vector<ForwardViolation> forward_violations(const Schema& schema) {
  std::vector<ForwardViolation> out;
  for (const auto* b : schema.blocks()) {
    auto v = block_violations(schema, *b);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

bool check_forward(const Schema& schema) { return forward_violations(schema).empty(); }

Schema forward_orient(const Schema& schema) {
  Schema out = schema;
  NameGen names(schema);
  std::vector<std::string> block_names;
  for (const auto* b : schema.blocks()) block_names.push_back(b->name);
  for (const auto& bn : block_names) {
    // Group the offending index variables by reading instruction.
    std::map<Label, std::set<std::string>> offending;
    for (const auto& v : block_violations(out, out.block(bn))) offending[v.reader].insert(v.variable);
    for (const auto& [reader, vars] : offending) {
      Block& b = mutable_block(out, bn);
      auto pos = static_cast<std::size_t>(
          std::find_if(b.instructions.begin(), b.instructions.end(),
                       [&](const Instruction& i) { return i.label == reader; }) -
          b.instructions.begin());
      Instruction& s1 = b.instructions[pos];
      if (const auto* body = s1.body()) {
        const Block& inner = out.block(*body);
        VarSets own = var_sets(out, s1);
        for (const auto& e : vars) {
          if (!inner.inline_body) {
            throw SchemaError("cannot forward-orient " + reader + ": index " + e +
                              " is used inside named procedure " + *body);
          }
          if (simple_names(own.val).contains(e)) {
            throw SchemaError("cannot forward-orient " + reader + ": its body changes index " + e);
          }
        }
      }
      std::vector<Instruction> copies;
      Label entry = reader;
      std::vector<std::pair<std::string, std::string>> renames;
      std::vector<Label> copy_labels;
      for (const auto& e : vars) {
        renames.emplace_back(e, names.index_copy());
        copy_labels.push_back(names.label());
      }
      for (std::size_t k = 0; k < renames.size(); ++k) {
        Label next = k + 1 < renames.size() ? copy_labels[k + 1] : reader;
        copies.push_back(Instruction{copy_labels[k], Assign{Variable::simple(renames[k].second),
                                                            Copy{Variable::simple(renames[k].first)}, next}});
        out.aux.insert(renames[k].second);
      }
      entry = copy_labels.front();
      for (auto& i : b.instructions) {
        i.remap_outputs([&](const Label& o) { return o == reader ? entry : o; });
      }
      Instruction renamed = b.instructions[pos];
      for (const auto& [from, to] : renames) rename_instruction_indexes(out, renamed, from, to);
      Block& again = mutable_block(out, bn);
      again.instructions[pos] = std::move(renamed);
      again.instructions.insert(again.instructions.begin() + static_cast<std::ptrdiff_t>(pos), copies.begin(),
                                copies.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loop separation
// ---------------------------------------------------------------------------

namespace {

bool intersects(const std::set<Variable>& a, const std::set<Variable>& b) {
  for (const auto& x : a) {
    if (b.contains(x)) return true;
  }
  return false;
}

struct LevelSplit {
  Block level;         // extracted level, with setters
  Block remainder;     // dispatch chain + the rest
  SeparationLevel info;
};

// One round of the construction on `work`: the instructions reachable from
// the start before any index produced on the way is used form the level.
LevelSplit split_level(const Schema& schema, const Block& work, const std::set<Label>& bookkeeping,
                       const std::string& vleb, NameGen& names, const Label& call_label) {
  BlockGraph g(work);
  std::vector<VarSets> sets;
  for (const auto& i : work.instructions) sets.push_back(var_sets(schema, i));

  std::vector<bool> free(work.instructions.size(), false);
  std::vector<std::set<Variable>> vs_out(work.instructions.size());
  std::set<std::size_t> reachable;
  for (auto u : g.topo_reachable()) reachable.insert(u);
  for (auto u : g.topo_reachable()) {
    std::set<Variable> vs_in;
    bool ok = true;
    for (auto p : g.pred[u]) {
      if (!reachable.contains(p)) continue;
      if (!free[p]) {
        ok = false;
        break;
      }
      vs_in.insert(vs_out[p].begin(), vs_out[p].end());
    }
    if (!ok || intersects(sets[u].ind, vs_in)) continue;
    free[u] = true;
    vs_out[u] = std::move(vs_in);
    vs_out[u].insert(sets[u].val.begin(), sets[u].val.end());
  }

  LevelSplit out;
  out.level.name = inline_body_name(call_label);
  out.level.inline_body = true;
  out.level.final_label = names.label();

  std::vector<Label> exits;
  std::map<Label, Label> setter;
  for (std::size_t u = 0; u < work.instructions.size(); ++u) {
    if (!free[u]) continue;
    Instruction instr = work.instructions[u];
    instr.remap_outputs([&](const Label& o) {
      auto it = g.pos.find(o);
      bool leaves = it == g.pos.end() || !free[it->second];
      if (!leaves) return o;
      auto [s, fresh] = setter.emplace(o, "");
      if (fresh) {
        s->second = names.label();
        exits.push_back(o);
      }
      return s->second;
    });
    if (!bookkeeping.contains(instr.label)) out.info.labels.push_back(instr.label);
    out.level.instructions.push_back(std::move(instr));
  }
  for (const auto& e : exits) {
    out.level.instructions.push_back(
        Instruction{setter[e], Assign{Variable::simple(vleb), LabelConst{e}, out.level.final_label}});
    if (e != work.final_label) out.info.limited.push_back(e);
  }

  out.remainder.name = work.name;
  out.remainder.final_label = work.final_label;
  std::vector<Instruction> rest;
  for (std::size_t u = 0; u < work.instructions.size(); ++u) {
    if (!free[u]) rest.push_back(work.instructions[u]);
  }
  if (exits.size() >= 2) {
    std::vector<Label> chain;
    for (std::size_t i = 0; i + 1 < exits.size(); ++i) chain.push_back(names.label());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      Label otherwise = i + 1 < chain.size() ? chain[i + 1] : exits.back();
      out.remainder.instructions.push_back(
          Instruction{chain[i], Cond{LabelTest{vleb, exits[i], true}, exits[i], otherwise}});
    }
  } else if (!exits.empty() && exits.front() != work.final_label) {
    // Single entry: it must come first to be the start instruction.
    auto it = std::find_if(rest.begin(), rest.end(), [&](const Instruction& i) { return i.label == exits.front(); });
    if (it != rest.end()) std::rotate(rest.begin(), it, it + 1);
  }
  for (auto& i : rest) out.remainder.instructions.push_back(std::move(i));
  return out;
}

// True when some instruction of the block changes an index variable of a
// different instruction of the block.
bool writes_foreign_index(const Schema& schema, const Block& b, const std::set<Label>& bookkeeping) {
  std::vector<VarSets> sets;
  std::vector<std::size_t> real;
  for (std::size_t i = 0; i < b.instructions.size(); ++i) {
    sets.push_back(var_sets(schema, b.instructions[i]));
    if (!bookkeeping.contains(b.instructions[i].label)) real.push_back(i);
  }
  for (auto a : real) {
    auto written = simple_names(sets[a].val);
    for (auto c : real) {
      if (a == c) continue;
      for (const auto& e : names_of(sets[c].ind)) {
        if (written.contains(e)) return true;
      }
    }
  }
  return false;
}

}  // namespace

std::pair<SeparatedLoop, SeparationReport> separate_loop(const Schema& schema, const Label& loop_label) {
  auto ref = locate(schema, loop_label);
  if (!ref) throw SchemaError("no instruction labelled " + loop_label);
  const Instruction& origin = instruction_at(schema, *ref);
  const Loop* loop = origin.as_loop();
  if (!loop) throw SchemaError(loop_label + " is not a loop");
  if (var_sets(schema, origin).ind.empty()) {
    throw EmptyIndexSet("separation requires indexed variables: loop " + loop_label + " has none");
  }
  const Block& body = schema.block(loop->body);
  {
    BlockGraph g(body);
    if (!g.back_edges().empty()) {
      throw NotForwardOriented("body of " + loop_label + " is not loop-structured");
    }
    auto v = block_violations(schema, body);
    if (!v.empty()) {
      throw NotForwardOriented("body of " + loop_label + " is not forward oriented: " + v.front().writer +
                               " changes index " + v.front().variable + " of " + v.front().reader);
    }
  }

  NameGen names(schema);
  SeparatedLoop sep;
  sep.loop = loop_label;
  sep.origin = origin;
  sep.schema = schema;
  SeparationReport report;

  Block work = body;
  std::set<Label> bookkeeping;
  std::vector<Label> call_labels;
  std::vector<Block> levels;
  for (std::size_t level = 1;; ++level) {
    std::string vleb = names.dispatch(level);
    Label call = names.label();
    LevelSplit split = split_level(schema, work, bookkeeping, vleb, names, call);
    for (const auto& i : split.level.instructions) {
      if (std::find(split.info.labels.begin(), split.info.labels.end(), i.label) == split.info.labels.end()) {
        bookkeeping.insert(i.label);
      }
    }
    for (const auto& i : split.remainder.instructions) {
      if (!body.find(i.label)) bookkeeping.insert(i.label);
    }
    sep.dispatch_vars.push_back(vleb);
    sep.schema.aux.insert(vleb);
    call_labels.push_back(call);
    levels.push_back(std::move(split.level));
    report.levels.push_back(std::move(split.info));
    work = std::move(split.remainder);
    bool done = work.instructions.empty() || !writes_foreign_index(schema, work, bookkeeping);
    if (done) break;
  }
  report.controller_count = levels.size();

  // The kernel is whatever is left.
  Label kernel_call = names.label();
  work.name = inline_body_name(kernel_call);
  work.inline_body = true;
  SeparationLevel kernel_info;
  for (const auto& i : work.instructions) {
    if (!bookkeeping.contains(i.label)) kernel_info.labels.push_back(i.label);
  }
  report.levels.push_back(std::move(kernel_info));
  call_labels.push_back(kernel_call);
  levels.push_back(std::move(work));

  // Rebuild the loop body as a chain of calls, one per level.
  Block new_body;
  new_body.name = inline_body_name(loop_label);
  new_body.inline_body = true;
  new_body.final_label = names.label();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    Label next = i + 1 < levels.size() ? call_labels[i + 1] : new_body.final_label;
    new_body.instructions.push_back(Instruction{call_labels[i], Call{levels[i].name, next}});
  }
  if (body.inline_body) {
    sep.schema.procs.erase(body.name);
  } else if (sep.schema.procs.contains(new_body.name)) {
    throw SchemaError("procedure name " + new_body.name + " is already taken");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i + 1 < levels.size()) {
      sep.controllers.push_back(levels[i].name);
    } else {
      sep.kernel = levels[i].name;
    }
    sep.schema.procs.emplace(levels[i].name, std::move(levels[i]));
  }
  auto new_ref = locate(sep.schema, loop_label);
  Block& owner = mutable_block(sep.schema, new_ref->block);
  std::get<Loop>(owner.instructions[new_ref->index].op).body = new_body.name;
  sep.schema.procs.emplace(new_body.name, std::move(new_body));

  report.level_conditions_hold = level_conditions(sep);
  VarSets kernel_sets = var_sets_block(sep.schema, sep.kernel);
  report.strictly_separated = true;
  for (const auto& c : sep.controllers) {
    VarSets cs = var_sets_block(sep.schema, c);
    if (intersects(kernel_sets.val, cs.arg) || intersects(kernel_sets.val, cs.ind)) {
      report.strictly_separated = false;
    }
  }
  return {std::move(sep), std::move(report)};
}

bool level_conditions(const SeparatedLoop& sep) {
  std::vector<VarSets> sets;
  for (const auto& c : sep.controllers) sets.push_back(var_sets_block(sep.schema, c));
  bool kernel_empty = sep.schema.block(sep.kernel).instructions.empty();
  if (!kernel_empty) sets.push_back(var_sets_block(sep.schema, sep.kernel));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (intersects(sets[i].ind, sets[j].val)) return false;
    }
    if (i >= 1 && !intersects(sets[i].ind, sets[i - 1].val)) return false;
  }
  return true;
}

DepthReport verify_controller_count(const SeparatedLoop& sep, const Diagram& diagram, std::uint64_t fuel,
                                    const Memory& preset) {
  std::set<Label> kernel_labels = labels_under(sep.schema, sep.kernel);
  std::size_t position = enclosing_loops(sep.schema, sep.loop).size();
  DepthReport report;
  report.controller_count = sep.controllers.size();
  std::optional<std::int64_t> first_pass;
  RunOptions options;
  options.fuel = fuel;
  options.preset = preset;
  options.observer = [&](const AccessEvent& e) {
    if (!e.cell.indexed() || !kernel_labels.contains(e.step.label)) return;
    if (e.step.iteration.size() <= position) return;
    std::int64_t pass = e.step.iteration[position];
    if (!first_pass) first_pass = pass;
    if (pass != *first_pass) return;
    ++report.kernel_accesses;
    for (const auto& t : e.cell.index) report.depth = std::max(report.depth, t.bracket_depth());
  };
  Outcome o = herbrand_run(sep.schema, diagram, options);
  if (o.status != Status::Final) {
    throw SchemaError("herbrand run did not finish: " + to_string(o.status) + " (" + o.reason + ")");
  }
  report.consistent = report.depth + 1 == static_cast<int>(report.controller_count);
  return report;
}

}  // namespace schemapar
