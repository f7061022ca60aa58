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

// Program schema data model.
//
// A schema is a set of labelled instructions over uninterpreted function and
// predicate symbols. Four instruction forms exist: assignment, conditional,
// do-while loop (with a body sub-schema) and procedure call. Counted `for`
// loops are loops whose control is an interpreted counter, and a handful of
// interpreted forms (plain copies, label constants and label tests) exist for
// the bookkeeping that normalization passes insert.
//
// Sub-schemas live in a flat, name-keyed procedure table. Inline bodies
// (written as `{ ... }` in the text form) are stored there too, under the
// name `body_<label>` of the instruction that owns them.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace schemapar {

using Label = std::string;

/// Base class of every error raised by the library.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Index expressions
// ---------------------------------------------------------------------------

/// Sorted multiset of variable names; the empty monomial is the constant 1.
using Monomial = std::vector<std::string>;

/// Integer polynomial over simple variables. Zero coefficients are never
/// stored, so structural equality is polynomial equality.
class Polynomial {
 public:
  Polynomial() = default;

  static Polynomial constant(std::int64_t value);
  static Polynomial variable(const std::string& name);

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator-() const;

  /// 0 for constants (including the zero polynomial).
  int degree() const;
  bool is_affine() const { return degree() <= 1; }
  bool is_constant() const { return degree() == 0; }
  bool is_zero() const { return terms_.empty(); }

  const std::map<Monomial, std::int64_t>& terms() const { return terms_; }
  std::int64_t constant_term() const;
  /// Coefficient of the degree-one monomial `name`.
  std::int64_t coefficient(const std::string& name) const;
  std::set<std::string> variables() const;

  /// Evaluates with overflow-checked arithmetic. Returns nullopt when a
  /// variable has no value or an intermediate result overflows.
  std::optional<std::int64_t> evaluate(
      const std::function<std::optional<std::int64_t>(const std::string&)>&
          lookup) const;

  Polynomial substitute(const std::map<std::string, std::int64_t>& values) const;
  Polynomial rename(const std::string& from, const std::string& to) const;

  /// Canonical text, e.g. `2*i-1`, `N+1`, `i*j`, `0`.
  std::string str() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
  friend auto operator<=>(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Monomial& m, std::int64_t coeff);
  std::map<Monomial, std::int64_t> terms_;
};

/// Uninterpreted index function applied to simple variables, e.g. `K(i, j)`.
struct IndexCall {
  std::string fsym;
  std::vector<std::string> args;

  friend bool operator==(const IndexCall&, const IndexCall&) = default;
  friend auto operator<=>(const IndexCall&, const IndexCall&) = default;
};

/// One subscript of an indexed variable. Integer-linear combinations are
/// Affine; higher-degree polynomials and uninterpreted calls are general
/// terms (the latter with no polynomial degree).
class IndexExpr {
 public:
  enum class Form { Affine, GeneralTerm };

  IndexExpr() = default;
  IndexExpr(Polynomial p) : repr_(std::move(p)) {}
  IndexExpr(IndexCall c) : repr_(std::move(c)) {}

  Form form() const;
  /// nullopt for non-polynomial (uninterpreted call) subscripts.
  std::optional<int> degree() const;

  const Polynomial* polynomial() const { return std::get_if<Polynomial>(&repr_); }
  const IndexCall* call() const { return std::get_if<IndexCall>(&repr_); }

  std::set<std::string> variables() const;
  IndexExpr rename(const std::string& from, const std::string& to) const;
  std::string str() const;

  friend bool operator==(const IndexExpr&, const IndexExpr&) = default;
  friend auto operator<=>(const IndexExpr&, const IndexExpr&) = default;

 private:
  std::variant<Polynomial, IndexCall> repr_;
};

// ---------------------------------------------------------------------------
// Variables and instructions
// ---------------------------------------------------------------------------

/// Simple variable `x` or indexed variable `a[K1(..), ..., Kn(..)]`.
/// Identity is syntactic: two variables are equal iff name and subscript
/// expressions are equal.
struct Variable {
  std::string name;
  std::vector<IndexExpr> indexes;

  static Variable simple(std::string name) { return Variable{std::move(name), {}}; }

  bool indexed() const { return !indexes.empty(); }
  /// Simple variables occurring in the subscripts.
  std::set<std::string> index_variables() const;
  std::string str() const;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// Uninterpreted function application `f(x1, ..., xn)`.
struct Apply {
  std::string fsym;
  std::vector<Variable> args;
  friend bool operator==(const Apply&, const Apply&) = default;
};

/// Interpreted copy `x = y`.
struct Copy {
  Variable source;
  friend bool operator==(const Copy&, const Copy&) = default;
};

/// Interpreted label constant `x = @l`.
struct LabelConst {
  Label label;
  friend bool operator==(const LabelConst&, const LabelConst&) = default;
};

/// Uninterpreted predicate `p(x1, ..., xn)`.
struct Predicate {
  std::string psym;
  std::vector<Variable> args;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Interpreted label comparison `x == @l` (equal) or `x != @l`.
struct LabelTest {
  std::string var;
  Label label;
  bool equal = true;
  friend bool operator==(const LabelTest&, const LabelTest&) = default;
};

/// `lhs < rhs` over affine expressions.
struct Bound {
  Polynomial lhs;
  Polynomial rhs;
  friend bool operator==(const Bound&, const Bound&) = default;
};

/// Interpreted loop counter of `for (v = start; c1 && c2 ...; v++)`.
struct Counter {
  std::string var;
  Polynomial start;
  std::vector<Bound> conditions;
  friend bool operator==(const Counter&, const Counter&) = default;
};

struct Assign {
  Variable target;
  std::variant<Apply, Copy, LabelConst> source;
  Label next;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct Cond {
  std::variant<Predicate, LabelTest> test;
  Label then_label;
  Label else_label;
  friend bool operator==(const Cond&, const Cond&) = default;
};

/// `do BODY while TEST then next`; with a Counter control it is a counted
/// loop whose body may run zero times.
struct Loop {
  std::string body;
  std::variant<Predicate, LabelTest, Counter> control;
  Label next;
  friend bool operator==(const Loop&, const Loop&) = default;
};

struct Call {
  std::string body;
  Label next;
  friend bool operator==(const Call&, const Call&) = default;
};

struct Instruction {
  Label label;
  std::variant<Assign, Cond, Loop, Call> op;

  const Assign* as_assign() const { return std::get_if<Assign>(&op); }
  const Cond* as_cond() const { return std::get_if<Cond>(&op); }
  const Loop* as_loop() const { return std::get_if<Loop>(&op); }
  const Call* as_call() const { return std::get_if<Call>(&op); }

  /// Output labels in syntactic order (then before else).
  std::vector<Label> outputs() const;
  /// Rewrites every output label through `map`.
  void remap_outputs(const std::function<Label(const Label&)>& map);
  /// Name of the body sub-schema for Loop/Call, nullptr otherwise.
  const std::string* body() const;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// A (sub)schema: ordered instructions, the first of which is the start
/// instruction, plus the unique final label.
struct Block {
  std::string name;
  std::vector<Instruction> instructions;
  Label final_label;
  bool inline_body = false;

  Label start_label() const {
    return instructions.empty() ? final_label : instructions.front().label;
  }
  const Instruction* find(const Label& label) const;
  Instruction* find(const Label& label);
  std::set<Label> input_labels() const;

  friend bool operator==(const Block&, const Block&) = default;
};

inline std::string inline_body_name(const Label& owner) { return "body_" + owner; }

struct Schema {
  Block main{"main", {}, "", false};
  std::map<std::string, Block> procs;
  /// Interpreted bookkeeping variables introduced by transformations.
  /// They are excluded when comparing final memories.
  std::set<std::string> aux;
  /// Programs with predecessors: an indexed read names the producing
  /// iteration, and an assignment to a simple target also records the value
  /// under the current iteration vector.
  bool predecessor_semantics = false;

  const Block& block(const std::string& name) const;
  Block& block(const std::string& name);
  const Block* find_block(const std::string& name) const;

  /// Main first, then procedures in name order.
  std::vector<const Block*> blocks() const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

/// Where an instruction lives.
struct InstructionRef {
  std::string block;
  std::size_t index = 0;
};

std::optional<InstructionRef> locate(const Schema& schema, const Label& label);
const Instruction& instruction_at(const Schema& schema, const InstructionRef& ref);

/// Symbol tables of a schema: function/predicate arities, simple variables,
/// array dimensionalities. First occurrence wins.
struct Signature {
  std::map<std::string, std::size_t> functions;
  std::map<std::string, std::size_t> predicates;
  std::set<std::string> simple;
  std::map<std::string, std::size_t> arrays;
};

Signature signature(const Schema& schema);

/// Uninterpreted symbols with arity (functions, index functions, predicates).
std::map<std::string, std::size_t> uninterpreted_symbols(const Schema& schema);

/// Visits every variable occurrence of an instruction (not of its body).
void for_each_variable(const Instruction& instr,
                       const std::function<void(const Variable&)>& visit);

/// Every label (inputs and finals) of a block and, recursively, of the inline
/// and named bodies it reaches.
std::set<Label> labels_under(const Schema& schema, const std::string& block);

/// Labels of the Loop instructions enclosing `label`, outermost first (the
/// instruction itself excluded). Empty when the label is not found.
std::vector<Label> enclosing_loops(const Schema& schema, const Label& label);

/// Deterministic fresh-name source seeded with every name already in use.
class NameGen {
 public:
  explicit NameGen(const Schema& schema);

  Label label();                               // m_aux<k>
  std::string index_copy();                    // newE_<k>
  std::string dispatch(std::size_t level);     // vLeb<level>
  std::string program_counter();               // pc<k>
  void reserve(const std::string& name) { used_.insert(name); }

 private:
  std::string take(const std::string& candidate);
  std::set<std::string> used_;
  std::size_t next_label_ = 0;
  std::size_t next_copy_ = 1;
  std::size_t next_pc_ = 1;
};

}  // namespace schemapar
