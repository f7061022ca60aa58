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

// Programs with predecessor indexes: iteration graphs, wavefront schedules,
// dependency cones, hyperplanes and replay.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "schemapar/dependence.hpp"
#include "schemapar/interpreter.hpp"
#include "schemapar/schema.hpp"

namespace schemapar {

struct NestLevel {
  Label loop;
  Counter counter;
};

/// A read of an array produced by the nest: the producing iteration, one
/// affine expression per nest level.
struct PredecessorRead {
  std::string array;
  std::vector<Polynomial> target;
  std::string str() const;
};

struct PredecessorStatement {
  Label label;
  std::string target;
  std::vector<PredecessorRead> reads;
};

struct PredecessorProgram {
  std::vector<NestLevel> nest;
  std::vector<PredecessorStatement> statements;
  std::string body;  // innermost block
  std::set<std::string> arrays;  // produced by the nest
  Schema schema;
};

/// Extracts the nest of a predecessor-semantics schema whose main block is
/// one perfect nest of counted loops around straight-line code. Throws
/// SchemaError otherwise.
PredecessorProgram predecessor_program(const Schema& schema);

/// Iterations of the nest in lexicographic order. A counter listed in
/// `overrides` takes that range instead of its own start and conditions.
std::vector<IterationVector> iteration_domain(const PredecessorProgram& prog, const Params& params,
                                              const Bounds& overrides = {});

/// Points with their in-domain predecessors.
struct IterationGraph {
  std::vector<IterationVector> points;  // sorted
  std::vector<std::vector<std::size_t>> preds;

  std::optional<std::size_t> find(const IterationVector& p) const;
  std::size_t edge_count() const;
};

IterationGraph build_graph(const PredecessorProgram& prog, const std::vector<IterationVector>& domain,
                           const Params& params);

/// Graph over the `depth`-dimensional steps of an ordinary-semantics run:
/// an edge for every immediate flow dependence between different
/// iterations.
IterationGraph dependence_graph(const Schema& schema, const Interpretation& interp, std::size_t depth,
                                std::uint64_t fuel);

struct PredecessorViolation {
  IterationVector point;
  Label label;
  std::string read;
  IterationVector target;
};

std::vector<PredecessorViolation> validate_predecessors(const PredecessorProgram& prog,
                                                        const std::vector<IterationVector>& domain,
                                                        const Params& params);

struct Wavefront {
  std::size_t level = 0;
  std::vector<IterationVector> iterations;  // sorted
};

class CycleDetected : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Frontier propagation: a point joins the front after the one holding its
/// last predecessor.
std::vector<Wavefront> schedule_wavefronts(const IterationGraph& graph);

struct Cone {
  IterationVector apex;
  std::set<IterationVector> members;
};

/// Throws SchemaError if the apex is not in the graph.
Cone cone_of(const IterationGraph& graph, const IterationVector& apex);

bool independent_set_check(const IterationGraph& graph, const std::vector<IterationVector>& points);

/// True iff every predecessor of a member of sets[t] that belongs to some
/// set belongs to an earlier one. Predecessors outside every set count as
/// already computed.
bool coschedulable_check(const IterationGraph& graph, const std::vector<std::vector<IterationVector>>& sets);

class NonConstantDistances : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Constant distance vectors (iteration minus producing iteration), sorted
/// and deduplicated. Throws NonConstantDistances.
std::vector<IterationVector> distance_vectors(const PredecessorProgram& prog, const Params& params);

struct Hyperplane {
  IterationVector normal;
  std::int64_t first = 0;  // smallest normal . it over the domain
  std::int64_t last = 0;
  bool verified = false;   // grouping by normal . it is coschedulable
};

/// Integer h with h . d >= 1 for every distance d, minimizing max|h_i|, then
/// sum|h_i|, then lexicographically; components bounded by `cap`.
std::optional<IterationVector> find_normal(const std::vector<IterationVector>& distances, int cap = 4);

/// Sets of equal normal . it, in increasing order.
std::vector<std::vector<IterationVector>> hyperplane_sets(const IterationGraph& graph, const IterationVector& normal);

std::optional<Hyperplane> find_hyperplane(const PredecessorProgram& prog, const IterationGraph& graph,
                                          const Params& params, int cap = 4);

/// A direction whose lines are each independent while some two lines cannot
/// run as one set.
struct LinePhenomenon {
  IterationVector direction;
  std::vector<std::vector<IterationVector>> lines;
  std::size_t first = 0;   // the failing pair
  std::size_t second = 0;
};

/// Searches directions with components in [-cap, cap] (first non-zero
/// component positive) in lexicographic order.
std::optional<LinePhenomenon> find_line_phenomenon(const IterationGraph& graph, int cap = 2);

struct ReplayReport {
  bool match = false;
  std::size_t fronts = 0;
  std::size_t compared_cells = 0;
  std::string detail;  // first difference
  Memory sequential;
  Memory parallel;
};

/// Runs the program lexicographically and front by front (members of a
/// front in a seeded random order, spread over `threads` workers, each on
/// the memory committed before the front), then compares the produced array
/// cells.
ReplayReport replay_wavefronts(const PredecessorProgram& prog, const std::vector<Wavefront>& fronts,
                               const Interpretation& interp, std::uint64_t seed, unsigned threads,
                               std::uint64_t fuel);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Key-sorted JSON document with `fronts`, per-front `level`, `size` and up
/// to `member_cap` members, and the hyperplane if any.
std::string schedule_json(const std::vector<Wavefront>& fronts, const std::optional<Hyperplane>& plane,
                          std::size_t member_cap);
std::string schedule_csv(const std::vector<Wavefront>& fronts);

std::string iteration_str(const IterationVector& it);

}  // namespace schemapar
