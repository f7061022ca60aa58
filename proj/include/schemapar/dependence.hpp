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

// Connection equations between iterations of counted loop nests, an exact
// solver for the affine case and an execution-log dependence oracle.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "schemapar/interpreter.hpp"
#include "schemapar/schema.hpp"

namespace schemapar {

/// Inclusive range of each loop counter.
using Bounds = std::map<std::string, std::pair<std::int64_t, std::int64_t>>;

/// Integer values of symbolic parameters such as `N`.
using Params = std::map<std::string, std::int64_t>;

/// Parses `k=1..3,i=0..4`. Throws SchemaError on malformed input or lo > hi.
Bounds parse_bounds(const std::string& text);
/// Parses `N=4,M=2`.
Params parse_params(const std::string& text);

/// One array occurrence inside a nest of counted loops.
struct ArrayAccess {
  Label label;
  std::string array;
  std::vector<IndexExpr> index;
  bool write = false;
  std::vector<std::string> counters;  // enclosing counted loops, outermost first
  std::vector<Label> loops;           // labels of those loops
};

/// Array accesses of every instruction whose enclosing loops are all
/// counted. Reads come first for an instruction, in argument order.
std::vector<ArrayAccess> collect_accesses(const Schema& schema);

/// Box of every counter of the schema whose range follows from its start and
/// conditions once `params` are substituted; `overrides` win.
Bounds derive_bounds(const Schema& schema, const Params& params, const Bounds& overrides = {});

struct ConnectionEquation {
  enum class Kind { Flow, Output };
  Kind kind = Kind::Flow;
  std::string array;
  Label writer;
  std::vector<IndexExpr> writer_index;
  Label reader;  // the second writer for Output equations
  std::vector<IndexExpr> reader_index;
  std::size_t reader_occurrence = 0;  // position among the reader's reads of `array`
  std::vector<std::string> counters;
  std::vector<std::pair<std::int64_t, std::int64_t>> domain;
  bool bounded = true;  // false when some counter has no bounds

  /// e.g. `f[k, i, j](s1|m1) = f[k, i-1, j](s1|m2)`.
  std::string str() const;
};

/// One equation per (write, read) pair and per (write, write) pair of the
/// same array under the same loop path.
std::vector<ConnectionEquation> build_connection_equations(const Schema& schema, const Bounds& bounds);

struct EquationClass {
  enum class Kind { Linear, Polynomial, General };
  Kind kind = Kind::Linear;
  int degree = 1;
  std::string reason;  // set for General

  std::string str() const;  // "linear", "polynomial(2)", "general"
};

EquationClass classify(const ConnectionEquation& eq, const Params& params = {});

struct SolutionSet {
  enum class Kind { Empty, Enumerated, Parametric, Unknown };
  Kind kind = Kind::Unknown;
  std::set<std::pair<IterationVector, IterationVector>> pairs;
  /// Lattice of all integer solutions (writer counters then reader
  /// counters): particular + integer combinations of generators.
  std::vector<std::int64_t> particular;
  std::vector<std::vector<std::int64_t>> generators;
  std::string note;
};

std::string to_string(SolutionSet::Kind kind);

/// Raised when the lattice has more than `cap` points in the box. The
/// parametric description is still available.
class CapExceeded : public SchemaError {
 public:
  CapExceeded(const std::string& message, SolutionSet partial)
      : SchemaError(message), partial_(std::move(partial)) {}
  const SolutionSet& partial() const { return partial_; }

 private:
  SolutionSet partial_;
};

struct SolveOptions {
  std::uint64_t cap = 1000000;
  /// Keep only pairs whose writer iteration is lexicographically smaller.
  bool forward_only = true;
  Params params;
};

/// Throws SchemaError unless classify() is Linear.
SolutionSet solve_linear(const ConnectionEquation& eq, const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Execution-log oracle
// ---------------------------------------------------------------------------

struct DependenceEdge {
  enum class Kind { Flow, Output };
  Step producer;
  Step consumer;
  CellKey cell;
  Kind kind = Kind::Flow;
  bool immediate = false;

  friend bool operator==(const DependenceEdge&, const DependenceEdge&) = default;
  friend auto operator<=>(const DependenceEdge& a, const DependenceEdge& b) {
    return std::tie(a.producer, a.consumer, a.cell, a.kind, a.immediate) <=>
           std::tie(b.producer, b.consumer, b.cell, b.kind, b.immediate);
  }
};

/// Runs the schema and reports, for every read, a Flow edge from each
/// earlier write of the same cell, and for every write an Output edge from
/// each earlier write; the latest one is immediate. Loop counters are not
/// tracked. Throws SchemaError when the run does not reach its final label.
std::set<DependenceEdge> brute_force_dependences(const Schema& schema, const Interpretation& interp,
                                                 const RunOptions& options);

class NotComparable : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

struct PairComparison {
  Label writer;
  Label reader;
  std::string array;
  std::size_t solver = 0;
  std::size_t oracle = 0;
  std::vector<std::pair<IterationVector, IterationVector>> only_solver;
  std::vector<std::pair<IterationVector, IterationVector>> only_oracle;
};

struct ComparisonReport {
  std::vector<PairComparison> pairs;
  bool match() const;
  std::size_t mismatches() const;
};

/// Compares the enumerated flow pairs of every equation with the oracle's
/// cross-iteration flow pairs, both restricted to executed steps.
ComparisonReport solver_vs_oracle(const Schema& schema, const Bounds& bounds, const Interpretation& interp,
                                  const SolveOptions& options, std::uint64_t fuel);

/// Interpretation for the oracle: random total functions plus the given
/// params as start values.
Interpretation oracle_interpretation(const Schema& schema, const Params& params, std::uint64_t seed);

/// One JSON object per line, sorted.
std::string dependence_json_lines(const std::set<DependenceEdge>& edges);
std::string dependence_dot(const std::set<DependenceEdge>& edges);

}  // namespace schemapar
