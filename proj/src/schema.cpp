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

#include "schemapar/schema.hpp"

#include <algorithm>
#include <sstream>

#include "checked.hpp"

namespace schemapar {

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(std::int64_t value) {
  Polynomial p;
  p.add_term({}, value);
  return p;
}

Polynomial Polynomial::variable(const std::string& name) {
  Polynomial p;
  p.add_term({name}, 1);
  return p;
}

void Polynomial::add_term(const Monomial& m, std::int64_t coeff) {
  if (coeff == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, coeff);
    return;
  }
  it->second = checked::add_or_throw(it->second, coeff);
  if (it->second == 0) terms_.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial r = *this;
  for (const auto& [m, c] : other.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r;
  for (const auto& [m, c] : terms_) r.add_term(m, checked::mul_or_throw(c, -1));
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + (-other); }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial r;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : other.terms_) {
      Monomial m = m1;
      m.insert(m.end(), m2.begin(), m2.end());
      std::sort(m.begin(), m.end());
      r.add_term(m, checked::mul_or_throw(c1, c2));
    }
  }
  return r;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
  return d;
}

std::int64_t Polynomial::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0 : it->second;
}

std::int64_t Polynomial::coefficient(const std::string& name) const {
  auto it = terms_.find(Monomial{name});
  return it == terms_.end() ? 0 : it->second;
}

std::set<std::string> Polynomial::variables() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_) out.insert(m.begin(), m.end());
  return out;
}

std::optional<std::int64_t> Polynomial::evaluate(
    const std::function<std::optional<std::int64_t>(const std::string&)>& lookup) const {
  std::int64_t total = 0;
  for (const auto& [m, c] : terms_) {
    std::optional<std::int64_t> term = c;
    for (const auto& v : m) {
      auto value = lookup(v);
      if (!value) return std::nullopt;
      term = checked::mul(*term, *value);
      if (!term) return std::nullopt;
    }
    auto sum = checked::add(total, *term);
    if (!sum) return std::nullopt;
    total = *sum;
  }
  return total;
}

Polynomial Polynomial::substitute(const std::map<std::string, std::int64_t>& values) const {
  Polynomial r;
  for (const auto& [m, c] : terms_) {
    Polynomial term = Polynomial::constant(c);
    for (const auto& v : m) {
      auto it = values.find(v);
      term = term * (it == values.end() ? Polynomial::variable(v) : Polynomial::constant(it->second));
    }
    r = r + term;
  }
  return r;
}

Polynomial Polynomial::rename(const std::string& from, const std::string& to) const {
  Polynomial r;
  for (const auto& [m, c] : terms_) {
    Monomial renamed = m;
    for (auto& v : renamed) {
      if (v == from) v = to;
    }
    std::sort(renamed.begin(), renamed.end());
    r.add_term(renamed, c);
  }
  return r;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const Monomial& m, std::int64_t c) {
    bool negative = c < 0;
    // |c| is safe except for INT64_MIN, which prints through the unsigned path
    std::uint64_t magnitude = negative ? (0 - static_cast<std::uint64_t>(c)) : static_cast<std::uint64_t>(c);
    if (first) {
      if (negative) out << '-';
    } else {
      out << (negative ? '-' : '+');
    }
    first = false;
    if (m.empty()) {
      out << magnitude;
      return;
    }
    if (magnitude != 1) out << magnitude << '*';
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) out << '*';
      out << m[i];
    }
  };
  for (const auto& [m, c] : terms_) {
    if (!m.empty()) emit(m, c);
  }
  if (auto c = constant_term(); c != 0) emit({}, c);
  return out.str();
}

// ---------------------------------------------------------------------------
// IndexExpr / Variable
// ---------------------------------------------------------------------------

IndexExpr::Form IndexExpr::form() const {
  if (const auto* p = polynomial(); p && p->is_affine()) return Form::Affine;
  return Form::GeneralTerm;
}

std::optional<int> IndexExpr::degree() const {
  if (const auto* p = polynomial()) return p->degree();
  return std::nullopt;
}

std::set<std::string> IndexExpr::variables() const {
  if (const auto* p = polynomial()) return p->variables();
  const auto* c = call();
  return {c->args.begin(), c->args.end()};
}

IndexExpr IndexExpr::rename(const std::string& from, const std::string& to) const {
  if (const auto* p = polynomial()) return IndexExpr(p->rename(from, to));
  IndexCall c = *call();
  for (auto& a : c.args) {
    if (a == from) a = to;
  }
  return IndexExpr(std::move(c));
}

std::string IndexExpr::str() const {
  if (const auto* p = polynomial()) return p->str();
  const auto* c = call();
  std::string out = c->fsym + "(";
  for (std::size_t i = 0; i < c->args.size(); ++i) {
    if (i) out += ", ";
    out += c->args[i];
  }
  return out + ")";
}

std::set<std::string> Variable::index_variables() const {
  std::set<std::string> out;
  for (const auto& e : indexes) {
    auto vs = e.variables();
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

std::string Variable::str() const {
  if (!indexed()) return name;
  std::string out = name + "[";
  for (std::size_t i = 0; i < indexes.size(); ++i) {
    if (i) out += ", ";
    out += indexes[i].str();
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Instruction / Block / Schema
// ---------------------------------------------------------------------------

std::vector<Label> Instruction::outputs() const {
  return std::visit(
      [](const auto& op) -> std::vector<Label> {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Cond>) {
          return {op.then_label, op.else_label};
        } else {
          return {op.next};
        }
      },
      op);
}

void Instruction::remap_outputs(const std::function<Label(const Label&)>& map) {
  std::visit(
      [&](auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Cond>) {
          op.then_label = map(op.then_label);
          op.else_label = map(op.else_label);
        } else {
          op.next = map(op.next);
        }
      },
      op);
}

const std::string* Instruction::body() const {
  if (const auto* l = as_loop()) return &l->body;
  if (const auto* c = as_call()) return &c->body;
  return nullptr;
}

const Instruction* Block::find(const Label& label) const {
  for (const auto& i : instructions) {
    if (i.label == label) return &i;
  }
  return nullptr;
}

Instruction* Block::find(const Label& label) {
  for (auto& i : instructions) {
    if (i.label == label) return &i;
  }
  return nullptr;
}

std::set<Label> Block::input_labels() const {
  std::set<Label> out;
  for (const auto& i : instructions) out.insert(i.label);
  return out;
}

const Block* Schema::find_block(const std::string& name) const {
  if (name == main.name) return &main;
  auto it = procs.find(name);
  return it == procs.end() ? nullptr : &it->second;
}

const Block& Schema::block(const std::string& name) const {
  if (const auto* b = find_block(name)) return *b;
  throw SchemaError("unknown procedure " + name);
}

Block& Schema::block(const std::string& name) {
  return const_cast<Block&>(static_cast<const Schema&>(*this).block(name));
}

std::vector<const Block*> Schema::blocks() const {
  std::vector<const Block*> out{&main};
  for (const auto& [name, b] : procs) out.push_back(&b);
  return out;
}

std::optional<InstructionRef> locate(const Schema& schema, const Label& label) {
  for (const auto* b : schema.blocks()) {
    for (std::size_t i = 0; i < b->instructions.size(); ++i) {
      if (b->instructions[i].label == label) return InstructionRef{b->name, i};
    }
  }
  return std::nullopt;
}

const Instruction& instruction_at(const Schema& schema, const InstructionRef& ref) {
  return schema.block(ref.block).instructions.at(ref.index);
}

void for_each_variable(const Instruction& instr,
                       const std::function<void(const Variable&)>& visit) {
  auto visit_all = [&](const std::vector<Variable>& vs) {
    for (const auto& v : vs) visit(v);
  };
  if (const auto* a = instr.as_assign()) {
    visit(a->target);
    if (const auto* ap = std::get_if<Apply>(&a->source)) visit_all(ap->args);
    if (const auto* cp = std::get_if<Copy>(&a->source)) visit(cp->source);
  } else if (const auto* c = instr.as_cond()) {
    if (const auto* p = std::get_if<Predicate>(&c->test)) visit_all(p->args);
    if (const auto* t = std::get_if<LabelTest>(&c->test)) visit(Variable::simple(t->var));
  } else if (const auto* l = instr.as_loop()) {
    if (const auto* p = std::get_if<Predicate>(&l->control)) visit_all(p->args);
    if (const auto* t = std::get_if<LabelTest>(&l->control)) visit(Variable::simple(t->var));
    if (const auto* k = std::get_if<Counter>(&l->control)) {
      visit(Variable::simple(k->var));
      for (const auto& v : k->start.variables()) visit(Variable::simple(v));
      for (const auto& b : k->conditions) {
        for (const auto& v : b.lhs.variables()) visit(Variable::simple(v));
        for (const auto& v : b.rhs.variables()) visit(Variable::simple(v));
      }
    }
  }
}

namespace {

void note_index_calls(const Variable& v, std::map<std::string, std::size_t>& out) {
  for (const auto& e : v.indexes) {
    if (const auto* c = e.call()) out.emplace(c->fsym, c->args.size());
  }
}

}  // namespace

Signature signature(const Schema& schema) {
  Signature sig;
  auto note_var = [&](const Variable& v) {
    if (v.indexed()) {
      sig.arrays.emplace(v.name, v.indexes.size());
      for (const auto& s : v.index_variables()) sig.simple.insert(s);
      note_index_calls(v, sig.functions);
    } else {
      sig.simple.insert(v.name);
    }
  };
  for (const auto* b : schema.blocks()) {
    for (const auto& instr : b->instructions) {
      for_each_variable(instr, note_var);
      if (const auto* a = instr.as_assign()) {
        if (const auto* ap = std::get_if<Apply>(&a->source)) sig.functions.emplace(ap->fsym, ap->args.size());
      } else if (const auto* c = instr.as_cond()) {
        if (const auto* p = std::get_if<Predicate>(&c->test)) sig.predicates.emplace(p->psym, p->args.size());
      } else if (const auto* l = instr.as_loop()) {
        if (const auto* p = std::get_if<Predicate>(&l->control)) sig.predicates.emplace(p->psym, p->args.size());
      }
    }
  }
  return sig;
}

std::map<std::string, std::size_t> uninterpreted_symbols(const Schema& schema) {
  Signature sig = signature(schema);
  auto out = sig.functions;
  out.insert(sig.predicates.begin(), sig.predicates.end());
  return out;
}

std::set<Label> labels_under(const Schema& schema, const std::string& block) {
  std::set<Label> out;
  std::set<std::string> seen;
  std::vector<std::string> work{block};
  while (!work.empty()) {
    std::string name = work.back();
    work.pop_back();
    if (!seen.insert(name).second) continue;
    const Block* b = schema.find_block(name);
    if (!b) continue;
    out.insert(b->final_label);
    for (const auto& i : b->instructions) {
      out.insert(i.label);
      if (const auto* body = i.body()) work.push_back(*body);
    }
  }
  return out;
}

namespace {

bool find_path(const Schema& schema, const std::string& block, const Label& label,
               std::vector<Label>& path, std::set<std::string>& active) {
  const Block* b = schema.find_block(block);
  if (!b || !active.insert(block).second) return false;
  for (const auto& i : b->instructions) {
    if (i.label == label) return true;
    if (const auto* body = i.body()) {
      bool loop = i.as_loop() != nullptr;
      if (loop) path.push_back(i.label);
      if (find_path(schema, *body, label, path, active)) return true;
      if (loop) path.pop_back();
    }
  }
  active.erase(block);
  return false;
}

}  // namespace

std::vector<Label> enclosing_loops(const Schema& schema, const Label& label) {
  std::vector<Label> path;
  std::set<std::string> active;
  if (!find_path(schema, schema.main.name, label, path, active)) return {};
  return path;
}

// ---------------------------------------------------------------------------
// NameGen
// ---------------------------------------------------------------------------

NameGen::NameGen(const Schema& schema) {
  for (const auto* b : schema.blocks()) {
    used_.insert(b->name);
    used_.insert(b->final_label);
    for (const auto& i : b->instructions) {
      used_.insert(i.label);
      for (const auto& o : i.outputs()) used_.insert(o);
      for_each_variable(i, [&](const Variable& v) {
        used_.insert(v.name);
        for (const auto& s : v.index_variables()) used_.insert(s);
      });
    }
  }
  for (const auto& [name, arity] : uninterpreted_symbols(schema)) used_.insert(name);
  used_.insert(schema.aux.begin(), schema.aux.end());
}

std::string NameGen::take(const std::string& candidate) {
  used_.insert(candidate);
  return candidate;
}

Label NameGen::label() {
  for (;;) {
    std::string c = "m_aux" + std::to_string(next_label_++);
    if (!used_.contains(c) && !used_.contains(inline_body_name(c))) return take(c);
  }
}

std::string NameGen::index_copy() {
  for (;;) {
    std::string c = "newE_" + std::to_string(next_copy_++);
    if (!used_.contains(c)) return take(c);
  }
}

std::string NameGen::dispatch(std::size_t level) {
  std::string base = "vLeb" + std::to_string(level);
  if (!used_.contains(base)) return take(base);
  for (std::size_t k = 1;; ++k) {
    std::string c = base + "_" + std::to_string(k);
    if (!used_.contains(c)) return take(c);
  }
}

std::string NameGen::program_counter() {
  for (;;) {
    std::string c = "pc" + std::to_string(next_pc_++);
    if (!used_.contains(c)) return take(c);
  }
}

}  // namespace schemapar
