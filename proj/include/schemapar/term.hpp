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

// Values of the interpreter.
//
// Concrete runs hold Int (and Label) terms; Herbrand runs hold symbolic
// terms recording how a value was computed: Var(x) for a start value,
// App(f, ts) for a function application and Cell(a, ts) for the untouched
// content of an array element.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schemapar/schema.hpp"

namespace schemapar {

class Term {
 public:
  enum class Kind { Var, Cell, App, Int, Label };

  Term() : Term(integer(0)) {}

  static Term var(std::string name);
  static Term cell(std::string array, std::vector<Term> index);
  static Term app(std::string fsym, std::vector<Term> args);
  static Term integer(std::int64_t value);
  static Term label(std::string name);

  Kind kind() const { return node_->kind; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_label() const { return kind() == Kind::Label; }
  /// Variable, array, function or label name; empty for Int.
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& args() const { return node_->args; }
  std::int64_t value() const { return node_->value; }

  /// Nesting depth of Cell constructors: 0 for leaves, Cell adds one level,
  /// App is transparent.
  int bracket_depth() const;

  /// Prefix syntax: `x`, `f(x, a[i])`, `a[1, 2]`, `-3`, `@l`.
  std::string str() const;

  friend bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Term> args;
    std::int64_t value = 0;
    int depth = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(Kind kind, std::string name, std::vector<Term> args, std::int64_t value);

  std::shared_ptr<const Node> node_;
};

/// Parses the prefix syntax produced by Term::str. Throws SchemaError.
Term parse_term(std::string_view text);

/// Identity of a memory cell: a simple name, or an array name with index
/// components.
struct CellKey {
  std::string name;
  std::vector<Term> index;

  static CellKey simple(std::string n) { return CellKey{std::move(n), {}}; }
  bool indexed() const { return !index.empty(); }
  std::string str() const;

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend std::strong_ordering operator<=>(const CellKey& a, const CellKey& b);
};

using Memory = std::map<CellKey, Term>;

/// Canonical `cell = value` lines, sorted by cell.
std::string dump_memory(const Memory& memory);

/// Signed ground atoms resolving predicates in Herbrand runs.
class Diagram {
 public:
  /// Throws SchemaError if the opposite truth value is already present.
  void set(const std::string& psym, std::vector<Term> args, bool truth);
  std::optional<bool> lookup(const std::string& psym, const std::vector<Term>& args) const;
  std::size_t size() const { return entries_.size(); }

  /// Lines `p(t1, ..., tn) = true|false`; `//` comments and blank lines are
  /// ignored.
  static Diagram parse(std::string_view text);
  std::string str() const;

 private:
  std::map<std::pair<std::string, std::vector<Term>>, bool> entries_;
};

}  // namespace schemapar
