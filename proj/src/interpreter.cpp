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

#include "schemapar/interpreter.hpp"

#include <random>
#include <sstream>

#include "checked.hpp"
#include "hash.hpp"

namespace schemapar {

std::string Step::str() const {
  std::string out = label + "(";
  for (std::size_t i = 0; i < iteration.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(iteration[i]);
  }
  return out + ")";
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Final:
      return "final";
    case Status::OutOfFuel:
      return "out-of-fuel";
    case Status::Undefined:
      return "undefined";
  }
  return "?";
}

namespace {

constexpr std::size_t kMaxCallDepth = 4000;

// How symbols and empty cells are resolved. Concrete and Herbrand runs differ
// only here.
class Semantics {
 public:
  virtual ~Semantics() = default;
  virtual bool symbolic() const = 0;
  virtual std::optional<Term> apply(const std::string& f, const std::vector<Term>& args,
                                    std::string& why) const = 0;
  virtual std::optional<bool> test(const std::string& p, const std::vector<Term>& args,
                                   std::string& why) const = 0;
  virtual std::optional<Term> empty_simple(const std::string& name) const = 0;
  virtual std::optional<Term> empty_cell(const CellKey& key) const = 0;
};

std::string call_text(const std::string& f, const std::vector<Term>& args) {
  return Term::app(f, args).str();
}

class ConcreteSemantics final : public Semantics {
 public:
  explicit ConcreteSemantics(const Interpretation& interp) : interp_(interp) {}

  bool symbolic() const override { return false; }

  std::optional<Term> apply(const std::string& f, const std::vector<Term>& args,
                            std::string& why) const override {
    auto it = interp_.functions.find(f);
    if (it == interp_.functions.end()) {
      why = "no interpretation for " + f;
      return std::nullopt;
    }
    auto ints = integers(f, args, why);
    if (!ints) return std::nullopt;
    auto r = it->second(*ints);
    if (!r) {
      why = "function " + call_text(f, args) + " has no value";
      return std::nullopt;
    }
    return Term::integer(*r);
  }

  std::optional<bool> test(const std::string& p, const std::vector<Term>& args,
                           std::string& why) const override {
    auto it = interp_.predicates.find(p);
    if (it == interp_.predicates.end()) {
      why = "no interpretation for " + p;
      return std::nullopt;
    }
    auto ints = integers(p, args, why);
    if (!ints) return std::nullopt;
    auto r = it->second(*ints);
    if (!r) why = "predicate " + call_text(p, args) + " has no value";
    return r;
  }

  std::optional<Term> empty_simple(const std::string&) const override { return std::nullopt; }

  std::optional<Term> empty_cell(const CellKey& key) const override {
    if (!interp_.fill) return std::nullopt;
    if (auto v = interp_.fill(key)) return Term::integer(*v);
    return std::nullopt;
  }

 private:
  static std::optional<std::vector<std::int64_t>> integers(const std::string& sym,
                                                          const std::vector<Term>& args,
                                                          std::string& why) {
    std::vector<std::int64_t> out;
    out.reserve(args.size());
    for (const auto& a : args) {
      if (!a.is_int()) {
        why = "non-integer value " + a.str() + " passed to " + sym;
        return std::nullopt;
      }
      out.push_back(a.value());
    }
    return out;
  }

  const Interpretation& interp_;
};

class HerbrandSemantics final : public Semantics {
 public:
  explicit HerbrandSemantics(const Diagram& diagram) : diagram_(diagram) {}

  bool symbolic() const override { return true; }

  std::optional<Term> apply(const std::string& f, const std::vector<Term>& args,
                            std::string&) const override {
    return Term::app(f, args);
  }

  std::optional<bool> test(const std::string& p, const std::vector<Term>& args,
                           std::string& why) const override {
    auto r = diagram_.lookup(p, args);
    if (!r) why = "diagram has no entry for " + call_text(p, args);
    return r;
  }

  std::optional<Term> empty_simple(const std::string& name) const override { return Term::var(name); }

  std::optional<Term> empty_cell(const CellKey& key) const override {
    return Term::cell(key.name, key.index);
  }

 private:
  const Diagram& diagram_;
};

// Stops execution of the current run; carries the outcome status.
struct Halt {
  Status status;
  std::string reason;
};

class Engine {
 public:
  Engine(const Schema& schema, const Semantics& sem, const RunOptions& options, Memory memory)
      : schema_(schema), sem_(sem), options_(options), mem_(std::move(memory)) {
    for (const auto& [k, v] : options.preset) mem_[k] = v;
    predecessor_arrays_ = schema.predecessor_semantics ? signature(schema).arrays
                                                       : std::map<std::string, std::size_t>{};
  }

  Outcome execute(const std::string& block, const IterationVector& iteration) {
    Outcome out;
    iter_ = iteration;
    try {
      run_block(block);
      out.status = Status::Final;
    } catch (const Halt& h) {
      out.status = h.status;
      out.reason = h.reason;
    }
    out.memory = std::move(mem_);
    out.steps = steps_;
    return out;
  }

 private:
  [[noreturn]] static void undefined(std::string why) { throw Halt{Status::Undefined, std::move(why)}; }

  void charge() {
    if (steps_ >= options_.fuel) throw Halt{Status::OutOfFuel, "fuel exhausted"};
    ++steps_;
  }

  void notify(AccessEvent::Kind kind, const CellKey& key) {
    if (options_.observer) options_.observer(AccessEvent{kind, Step{current_, iter_}, key});
  }

  const std::map<Label, const Instruction*>& index_of(const Block& b) {
    auto it = label_index_.find(b.name);
    if (it != label_index_.end()) return it->second;
    auto& m = label_index_[b.name];
    for (const auto& i : b.instructions) m.emplace(i.label, &i);
    return m;
  }

  void run_block(const std::string& name) {
    if (++depth_ > kMaxCallDepth) throw Halt{Status::OutOfFuel, "call depth limit reached"};
    const Block* b = schema_.find_block(name);
    if (!b) undefined("unknown procedure " + name);
    const auto& index = index_of(*b);
    Label at = b->start_label();
    while (at != b->final_label) {
      auto it = index.find(at);
      if (it == index.end()) undefined("no instruction labelled " + at);
      at = execute(*it->second);
    }
    --depth_;
  }

  Label execute(const Instruction& instr) {
    current_ = instr.label;
    if (const auto* a = instr.as_assign()) {
      charge();
      assign(*a);
      return a->next;
    }
    if (const auto* c = instr.as_cond()) {
      charge();
      return test(c->test) ? c->then_label : c->else_label;
    }
    if (const auto* l = instr.as_loop()) {
      loop(instr.label, *l);
      return l->next;
    }
    const auto& call = std::get<Call>(instr.op);
    charge();
    run_block(call.body);
    current_ = instr.label;
    return call.next;
  }

  // --- values ---

  std::optional<Term> lookup(const CellKey& key) const {
    auto it = mem_.find(key);
    if (it != mem_.end()) return it->second;
    return std::nullopt;
  }

  Term read_simple(const std::string& name) {
    CellKey key = CellKey::simple(name);
    notify(AccessEvent::Kind::Read, key);
    if (auto v = lookup(key)) return *v;
    if (auto v = sem_.empty_simple(name)) return *v;
    undefined("argument " + name + " empty");
  }

  Term index_value(const IndexExpr& e) {
    if (const auto* c = e.call()) {
      std::vector<Term> args;
      for (const auto& a : c->args) args.push_back(read_simple(a));
      std::string why;
      auto r = sem_.apply(c->fsym, args, why);
      if (!r) undefined(why);
      return *r;
    }
    const Polynomial& p = *e.polynomial();
    std::map<std::string, Term> values;
    bool all_int = true;
    for (const auto& v : p.variables()) {
      Term t = read_simple(v);
      all_int = all_int && t.is_int();
      values.emplace(v, t);
    }
    if (all_int) {
      auto r = p.evaluate([&](const std::string& v) -> std::optional<std::int64_t> {
        return values.at(v).value();
      });
      if (!r) undefined("integer overflow in index " + p.str());
      return Term::integer(*r);
    }
    if (!sem_.symbolic()) undefined("index " + p.str() + " has a non-integer operand");
    return symbolic_polynomial(p, values);
  }

  static Term symbolic_polynomial(const Polynomial& p, const std::map<std::string, Term>& values) {
    std::vector<Term> parts;
    for (const auto& [m, c] : p.terms()) {
      std::vector<Term> factors;
      if (c != 1 || m.empty()) factors.push_back(Term::integer(c));
      for (const auto& v : m) factors.push_back(values.at(v));
      parts.push_back(factors.size() == 1 ? factors.front() : Term::app("*", std::move(factors)));
    }
    return parts.size() == 1 ? parts.front() : Term::app("+", std::move(parts));
  }

  CellKey resolve(const Variable& v) {
    CellKey key{v.name, {}};
    for (const auto& e : v.indexes) key.index.push_back(index_value(e));
    return key;
  }

  Term read(const Variable& v) {
    if (!v.indexed()) return read_simple(v.name);
    CellKey key = resolve(v);
    notify(AccessEvent::Kind::Read, key);
    if (auto t = lookup(key)) return *t;
    if (auto t = sem_.empty_cell(key)) return *t;
    undefined("argument " + key.str() + " empty");
  }

  void write(const CellKey& key, Term value) {
    notify(AccessEvent::Kind::Write, key);
    mem_[key] = std::move(value);
  }

  // --- instructions ---

  void assign(const Assign& a) {
    Term value;
    if (const auto* ap = std::get_if<Apply>(&a.source)) {
      std::vector<Term> args;
      for (const auto& x : ap->args) args.push_back(read(x));
      std::string why;
      auto r = sem_.apply(ap->fsym, args, why);
      if (!r) undefined(why);
      value = *r;
    } else if (const auto* cp = std::get_if<Copy>(&a.source)) {
      value = read(cp->source);
    } else {
      value = Term::label(std::get<LabelConst>(a.source).label);
    }
    CellKey key = resolve(a.target);
    if (!a.target.indexed() && predecessor_arrays_.contains(a.target.name)) {
      CellKey cell{a.target.name, {}};
      for (auto c : iter_) cell.index.push_back(Term::integer(c));
      write(cell, value);
    }
    write(key, std::move(value));
  }

  bool test(const std::variant<Predicate, LabelTest>& t) {
    if (const auto* p = std::get_if<Predicate>(&t)) return predicate(*p);
    return label_test(std::get<LabelTest>(t));
  }

  bool predicate(const Predicate& p) {
    std::vector<Term> args;
    for (const auto& x : p.args) args.push_back(read(x));
    std::string why;
    auto r = sem_.test(p.psym, args, why);
    if (!r) undefined(why);
    return *r;
  }

  bool label_test(const LabelTest& t) {
    CellKey key = CellKey::simple(t.var);
    notify(AccessEvent::Kind::Read, key);
    auto v = lookup(key);
    if (!v) undefined("argument " + t.var + " empty");
    bool same = v->is_label() && v->name() == t.label;
    return same == t.equal;
  }

  std::int64_t counter_int(const Polynomial& p, const std::string& what) {
    auto r = p.evaluate([&](const std::string& v) -> std::optional<std::int64_t> {
      auto t = lookup(CellKey::simple(v));
      if (!t || !t->is_int()) return std::nullopt;
      return t->value();
    });
    if (!r) undefined(what + " " + p.str() + " is not an integer");
    return *r;
  }

  void loop(const Label& label, const Loop& l) {
    iter_.push_back(0);
    if (const auto* k = std::get_if<Counter>(&l.control)) {
      CellKey var = CellKey::simple(k->var);
      mem_[var] = Term::integer(counter_int(k->start, "start of counter " + k->var));
      for (;;) {
        bool go = true;
        for (const auto& b : k->conditions) {
          if (counter_int(b.lhs, "bound") >= counter_int(b.rhs, "bound")) go = false;
        }
        if (!go) break;
        std::int64_t value = mem_[var].value();
        iter_.back() = value;
        charge();
        run_block(l.body);
        current_ = label;
        auto now = lookup(var);
        if (!now || !now->is_int()) undefined("counter " + k->var + " is not an integer");
        auto next = checked::add(now->value(), 1);
        if (!next) undefined("integer overflow in counter " + k->var);
        mem_[var] = Term::integer(*next);
      }
    } else {
      for (std::int64_t pass = 0;; ++pass) {
        iter_.back() = pass;
        charge();
        run_block(l.body);
        current_ = label;
        bool again = std::holds_alternative<Predicate>(l.control)
                         ? predicate(std::get<Predicate>(l.control))
                         : label_test(std::get<LabelTest>(l.control));
        if (!again) break;
      }
    }
    iter_.pop_back();
  }

  const Schema& schema_;
  const Semantics& sem_;
  const RunOptions& options_;
  Memory mem_;
  std::map<std::string, std::size_t> predecessor_arrays_;
  std::map<std::string, std::map<Label, const Instruction*>> label_index_;
  IterationVector iter_;
  Label current_;
  std::uint64_t steps_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace

Outcome run(const Schema& schema, const Interpretation& interp, std::uint64_t fuel) {
  RunOptions options;
  options.fuel = fuel;
  return run(schema, interp, options);
}

Outcome run(const Schema& schema, const Interpretation& interp, const RunOptions& options) {
  ConcreteSemantics sem(interp);
  return Engine(schema, sem, options, interp.start).execute(schema.main.name, {});
}

Outcome herbrand_run(const Schema& schema, const Diagram& diagram, std::uint64_t fuel) {
  RunOptions options;
  options.fuel = fuel;
  return herbrand_run(schema, diagram, options);
}

Outcome herbrand_run(const Schema& schema, const Diagram& diagram, const RunOptions& options) {
  HerbrandSemantics sem(diagram);
  return Engine(schema, sem, options, {}).execute(schema.main.name, {});
}

Outcome run_block(const Schema& schema, const Interpretation& interp, const std::string& block,
                  Memory memory, const IterationVector& iteration, const RunOptions& options) {
  ConcreteSemantics sem(interp);
  return Engine(schema, sem, options, std::move(memory)).execute(block, iteration);
}

std::optional<std::int64_t> evaluate_term(const Term& term, const Interpretation& interp) {
  switch (term.kind()) {
    case Term::Kind::Int:
      return term.value();
    case Term::Kind::Label:
      return std::nullopt;
    case Term::Kind::Var: {
      auto it = interp.start.find(CellKey::simple(term.name()));
      if (it == interp.start.end() || !it->second.is_int()) return std::nullopt;
      return it->second.value();
    }
    case Term::Kind::Cell: {
      CellKey key{term.name(), {}};
      for (const auto& a : term.args()) {
        auto v = evaluate_term(a, interp);
        if (!v) return std::nullopt;
        key.index.push_back(Term::integer(*v));
      }
      if (auto it = interp.start.find(key); it != interp.start.end()) {
        if (!it->second.is_int()) return std::nullopt;
        return it->second.value();
      }
      if (interp.fill) return interp.fill(key);
      return std::nullopt;
    }
    case Term::Kind::App: {
      std::vector<std::int64_t> args;
      for (const auto& a : term.args()) {
        auto v = evaluate_term(a, interp);
        if (!v) return std::nullopt;
        args.push_back(*v);
      }
      if (term.name() == "+" || term.name() == "*") {
        std::int64_t acc = term.name() == "+" ? 0 : 1;
        for (auto v : args) {
          auto r = term.name() == "+" ? checked::add(acc, v) : checked::mul(acc, v);
          if (!r) return std::nullopt;
          acc = *r;
        }
        return acc;
      }
      auto it = interp.functions.find(term.name());
      if (it == interp.functions.end()) return std::nullopt;
      return it->second(args);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Random interpretations
// ---------------------------------------------------------------------------

namespace {

std::int64_t reduce(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

std::uint64_t hash_args(std::uint64_t seed, const std::string& sym, const std::vector<std::int64_t>& args,
                        std::int64_t m) {
  std::uint64_t h = hash::combine(seed, hash::fnv1a(sym));
  for (auto a : args) h = hash::combine(h, static_cast<std::uint64_t>(reduce(a, m)));
  return h;
}

}  // namespace

Interpretation random_interpretation(const std::map<std::string, std::size_t>& functions,
                                     const std::map<std::string, std::size_t>& predicates,
                                     const std::set<std::string>& variables, std::uint64_t seed,
                                     std::int64_t modulus) {
  if (modulus < 2) throw SchemaError("modulus must be at least 2");
  Interpretation interp;
  for (const auto& [f, arity] : functions) {
    interp.functions[f] = [seed, f, modulus](const std::vector<std::int64_t>& args) -> std::optional<std::int64_t> {
      return static_cast<std::int64_t>(hash_args(seed, f, args, modulus) % static_cast<std::uint64_t>(modulus));
    };
  }
  for (const auto& [p, arity] : predicates) {
    interp.predicates[p] = [seed, p, modulus](const std::vector<std::int64_t>& args) -> std::optional<bool> {
      return (hash_args(hash::combine(seed, 0x9e3779b97f4a7c15ULL), p, args, modulus) >> 17) & 1U;
    };
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(0, modulus - 1);
  for (const auto& v : variables) interp.start[CellKey::simple(v)] = Term::integer(dist(rng));
  interp.fill = [seed, modulus](const CellKey& key) -> std::optional<std::int64_t> {
    std::uint64_t h = hash::combine(hash::combine(seed, 0x51ed27ULL), hash::fnv1a(key.name));
    for (const auto& t : key.index) {
      if (!t.is_int()) return std::nullopt;
      h = hash::combine(h, static_cast<std::uint64_t>(t.value()));
    }
    return static_cast<std::int64_t>(h % static_cast<std::uint64_t>(modulus));
  };
  return interp;
}

Interpretation random_interpretation(const Schema& schema, std::uint64_t seed, std::int64_t modulus) {
  Signature sig = signature(schema);
  std::set<std::string> vars;
  for (const auto& v : sig.simple) {
    if (!schema.aux.contains(v)) vars.insert(v);
  }
  return random_interpretation(sig.functions, sig.predicates, vars, seed, modulus);
}

Memory strip_aux(const Memory& memory, const std::set<std::string>& aux) {
  Memory out;
  for (const auto& [k, v] : memory) {
    if (!aux.contains(k.name)) out.emplace(k, v);
  }
  return out;
}

namespace {

std::string first_difference(const Memory& a, const Memory& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      return ia->first.str() + " = " + ia->second.str() + " only in the first memory";
    }
    if (ia == a.end() || ib->first < ia->first) {
      return ib->first.str() + " = " + ib->second.str() + " only in the second memory";
    }
    if (ia->second != ib->second) {
      return ia->first.str() + ": " + ia->second.str() + " vs " + ib->second.str();
    }
    ++ia;
    ++ib;
  }
  return "";
}

}  // namespace

Verdict t_equal_check(const Schema& s1, const Schema& s2, std::size_t trials, std::uint64_t fuel,
                      std::uint64_t seed) {
  Signature g1 = signature(s1);
  Signature g2 = signature(s2);
  if (g1.functions != g2.functions || g1.predicates != g2.predicates) {
    throw SignatureMismatch("schemas use different uninterpreted symbols");
  }
  std::set<std::string> aux = s1.aux;
  aux.insert(s2.aux.begin(), s2.aux.end());
  std::set<std::string> vars;
  for (const auto* g : {&g1, &g2}) {
    for (const auto& v : g->simple) {
      if (!aux.contains(v)) vars.insert(v);
    }
  }
  Verdict verdict;
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint64_t trial_seed = hash::combine(seed, t);
    Interpretation interp = random_interpretation(g1.functions, g1.predicates, vars, trial_seed);
    Outcome o1 = run(s1, interp, fuel);
    Outcome o2 = run(s2, interp, fuel);
    if (o1.status == Status::OutOfFuel || o2.status == Status::OutOfFuel) {
      ++verdict.skipped;
      continue;
    }
    ++verdict.compared;
    std::string diff;
    if (o1.status != o2.status) {
      diff = "statuses differ: " + to_string(o1.status) + " vs " + to_string(o2.status);
    } else if (o1.status == Status::Final) {
      diff = first_difference(strip_aux(o1.memory, aux), strip_aux(o2.memory, aux));
    }
    if (!diff.empty()) {
      verdict.counterexample = true;
      verdict.trial = t;
      verdict.trial_seed = trial_seed;
      verdict.detail = diff;
      return verdict;
    }
  }
  return verdict;
}

}  // namespace schemapar
