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

#include "schemapar/var_sets.hpp"

namespace schemapar {

VarSets& VarSets::operator|=(const VarSets& other) {
  ind.insert(other.ind.begin(), other.ind.end());
  arg.insert(other.arg.begin(), other.arg.end());
  val.insert(other.val.begin(), other.val.end());
  return *this;
}

namespace {

void add_indexes(const Variable& v, std::set<Variable>& ind) {
  for (const auto& name : v.index_variables()) ind.insert(Variable::simple(name));
}

VarSets block_sets(const Schema& schema, const std::string& name, std::set<std::string>& active);

VarSets instr_sets(const Schema& schema, const Instruction& instr, std::set<std::string>& active) {
  VarSets s;
  if (const auto* a = instr.as_assign()) {
    add_indexes(a->target, s.ind);
    s.val.insert(a->target);
    if (const auto* ap = std::get_if<Apply>(&a->source)) {
      for (const auto& x : ap->args) {
        add_indexes(x, s.ind);
        s.arg.insert(x);
      }
    } else if (const auto* cp = std::get_if<Copy>(&a->source)) {
      add_indexes(cp->source, s.ind);
      s.arg.insert(cp->source);
    }
  } else if (const auto* c = instr.as_cond()) {
    if (const auto* p = std::get_if<Predicate>(&c->test)) {
      for (const auto& x : p->args) {
        add_indexes(x, s.ind);
        s.arg.insert(x);
      }
    } else {
      s.arg.insert(Variable::simple(std::get<LabelTest>(c->test).var));
    }
  } else {
    const std::string& body = *instr.body();
    // A procedure already on the stack is recursive; its sets are being
    // computed further up, so contribute nothing here.
    if (!active.contains(body) && schema.find_block(body)) s |= block_sets(schema, body, active);
    if (const auto* l = instr.as_loop()) {
      if (const auto* p = std::get_if<Predicate>(&l->control)) {
        for (const auto& x : p->args) s.arg.insert(x);
      } else if (const auto* t = std::get_if<LabelTest>(&l->control)) {
        s.arg.insert(Variable::simple(t->var));
      } else {
        const auto& k = std::get<Counter>(l->control);
        s.val.insert(Variable::simple(k.var));
        s.arg.insert(Variable::simple(k.var));
        auto note = [&](const Polynomial& p) {
          for (const auto& v : p.variables()) s.arg.insert(Variable::simple(v));
        };
        note(k.start);
        for (const auto& b : k.conditions) {
          note(b.lhs);
          note(b.rhs);
        }
      }
    }
  }
  s.arg.insert(s.ind.begin(), s.ind.end());
  return s;
}

VarSets block_sets(const Schema& schema, const std::string& name, std::set<std::string>& active) {
  VarSets s;
  const Block* b = schema.find_block(name);
  if (!b) return s;
  active.insert(name);
  for (const auto& i : b->instructions) s |= instr_sets(schema, i, active);
  active.erase(name);
  return s;
}

}  // namespace

VarSets var_sets(const Schema& schema, const Instruction& instr) {
  std::set<std::string> active;
  return instr_sets(schema, instr, active);
}

VarSets var_sets_block(const Schema& schema, const std::string& block) {
  std::set<std::string> active;
  return block_sets(schema, block, active);
}

VarSets var_sets_schema(const Schema& schema) {
  VarSets s;
  for (const auto* b : schema.blocks()) {
    for (const auto& i : b->instructions) {
      s |= var_sets(schema, i);
    }
  }
  return s;
}

std::set<std::string> names_of(const std::set<Variable>& vars) {
  std::set<std::string> out;
  for (const auto& v : vars) out.insert(v.name);
  return out;
}

std::set<std::string> simple_names(const std::set<Variable>& vars) {
  std::set<std::string> out;
  for (const auto& v : vars) {
    if (!v.indexed()) out.insert(v.name);
  }
  return out;
}

}  // namespace schemapar
