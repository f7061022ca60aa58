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

// Execution of schemas under concrete integer interpretations and under the
// standard (Herbrand) interpretation driven by a predicate diagram.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "schemapar/schema.hpp"
#include "schemapar/term.hpp"

namespace schemapar {

using IterationVector = std::vector<std::int64_t>;

/// One execution of an instruction: its label plus the counters of the
/// enclosing loops, outermost first. A counted loop contributes its counter
/// value, a do-while loop the 0-based pass number.
struct Step {
  Label label;
  IterationVector iteration;

  std::string str() const;
  friend bool operator==(const Step&, const Step&) = default;
  friend auto operator<=>(const Step&, const Step&) = default;
};

struct AccessEvent {
  enum class Kind { Read, Write };
  Kind kind;
  Step step;
  CellKey cell;
};

enum class Status { Final, OutOfFuel, Undefined };
std::string to_string(Status status);

struct Outcome {
  Status status = Status::Undefined;
  Memory memory;
  std::uint64_t steps = 0;
  std::string reason;  // set when status != Final
};

using IntFunction = std::function<std::optional<std::int64_t>(const std::vector<std::int64_t>&)>;
using IntPredicate = std::function<std::optional<bool>(const std::vector<std::int64_t>&)>;

struct Interpretation {
  /// Function symbols, index functions included. A nullopt result means the
  /// (partial) function has no value there.
  std::map<std::string, IntFunction> functions;
  std::map<std::string, IntPredicate> predicates;
  Memory start;
  /// Optional value of array cells never written; unset means such cells are
  /// empty.
  std::function<std::optional<std::int64_t>(const CellKey&)> fill;
};

struct RunOptions {
  std::uint64_t fuel = 1000000;
  /// Receives every variable read and write in execution order. Writes of
  /// loop counters are not reported.
  std::function<void(const AccessEvent&)> observer;
  /// Cells preset on top of the start memory (e.g. `N = 4` in a Herbrand run).
  Memory preset;
};

Outcome run(const Schema& schema, const Interpretation& interp, std::uint64_t fuel);
Outcome run(const Schema& schema, const Interpretation& interp, const RunOptions& options);

/// Every simple variable x starts as Var(x); never-written array cells read
/// as Cell terms; predicates are looked up in the diagram.
Outcome herbrand_run(const Schema& schema, const Diagram& diagram, std::uint64_t fuel);
Outcome herbrand_run(const Schema& schema, const Diagram& diagram, const RunOptions& options);

/// Runs one pass of `block` (not necessarily main) on `memory` with the
/// given enclosing iteration vector. Used to replay single iterations.
Outcome run_block(const Schema& schema, const Interpretation& interp, const std::string& block,
                  Memory memory, const IterationVector& iteration, const RunOptions& options);

/// Value of a Herbrand term under a concrete interpretation whose start
/// memory supplies the Var leaves. Index arithmetic nodes `+` and `*` are
/// evaluated as integers.
std::optional<std::int64_t> evaluate_term(const Term& term, const Interpretation& interp);

// ---------------------------------------------------------------------------
// Random total interpretations and t-equality falsification
// ---------------------------------------------------------------------------

class SignatureMismatch : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Total interpretation over Z_modulus: functions and predicates are seeded
/// hash tables of their reduced arguments; every simple variable of
/// `variables` gets a seeded start value; unwritten array cells get a seeded
/// fill value.
Interpretation random_interpretation(const std::map<std::string, std::size_t>& functions,
                                     const std::map<std::string, std::size_t>& predicates,
                                     const std::set<std::string>& variables, std::uint64_t seed,
                                     std::int64_t modulus = 7);

/// Random interpretation covering the symbols and non-auxiliary simple
/// variables of a schema.
Interpretation random_interpretation(const Schema& schema, std::uint64_t seed,
                                     std::int64_t modulus = 7);

struct Verdict {
  bool counterexample = false;
  std::size_t trial = 0;       // failing trial (valid if counterexample)
  std::uint64_t trial_seed = 0;
  std::string detail;
  std::size_t compared = 0;    // trials where both runs stopped within fuel
  std::size_t skipped = 0;     // trials abandoned because of fuel
};

/// Runs both schemas under `trials` random total interpretations. Memories
/// are compared without auxiliary variables. Throws SignatureMismatch when
/// the uninterpreted symbols differ.
Verdict t_equal_check(const Schema& s1, const Schema& s2, std::size_t trials, std::uint64_t fuel,
                      std::uint64_t seed);

/// Memory without cells named in `aux`.
Memory strip_aux(const Memory& memory, const std::set<std::string>& aux);

}  // namespace schemapar
