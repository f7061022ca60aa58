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

// Schema-to-schema passes: loop-structured normalization, forward
// orientation and separation of loop bodies into controllers and a kernel.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "schemapar/schema.hpp"
#include "schemapar/term.hpp"

namespace schemapar {

class RecursionUnsupported : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class NotForwardOriented : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class EmptyIndexSet : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

// ---------------------------------------------------------------------------
// Loop-structured schemas
// ---------------------------------------------------------------------------

struct LViolation {
  enum class Kind { LabelOrder, Recursion };
  Kind kind;
  std::string block;
  Label label;  // instruction with the backward output (LabelOrder)
  std::string message;
};

/// Backward label edges (a goto loop outside a Loop form) and recursive
/// procedures, in a deterministic order.
std::vector<LViolation> check_l_schema(const Schema& schema);

/// Encapsulates every block that has a backward label edge in one do-while
/// loop dispatching on an interpreted program counter. Schemas that are
/// already loop-structured are returned unchanged. Throws
/// RecursionUnsupported for recursive procedures.
Schema to_l_schema(const Schema& schema);

// ---------------------------------------------------------------------------
// Forward orientation
// ---------------------------------------------------------------------------

struct ForwardViolation {
  std::string block;
  Label reader;      // instruction using the index variable
  Label writer;      // later instruction changing it
  std::string variable;
};

std::vector<ForwardViolation> forward_violations(const Schema& schema);
bool check_forward(const Schema& schema);

/// Inserts `newE_k = E` ahead of each instruction whose index variable E is
/// changed later on one of its branches, and reads newE_k in that
/// instruction's index positions instead. Idempotent.
Schema forward_orient(const Schema& schema);

// ---------------------------------------------------------------------------
// Loop separation
// ---------------------------------------------------------------------------

struct SeparatedLoop {
  Label loop;                            // label of the separated loop
  Instruction origin;                    // the loop as it was before
  std::vector<std::string> controllers;  // level blocks, in execution order
  std::string kernel;                    // last level block (may be empty)
  std::vector<std::string> dispatch_vars;
  Schema schema;                         // input schema with the loop rebuilt
};

struct SeparationLevel {
  std::vector<Label> labels;   // original instructions placed in the level
  std::vector<Label> limited;  // where execution leaves the level
};

struct SeparationReport {
  std::size_t controller_count = 0;
  bool strictly_separated = false;
  /// The index/output set conditions between consecutive levels hold.
  bool level_conditions_hold = false;
  std::vector<SeparationLevel> levels;  // controllers, then the kernel
};

/// Throws EmptyIndexSet when the loop has no index variables and
/// NotForwardOriented when its body is not forward oriented.
std::pair<SeparatedLoop, SeparationReport> separate_loop(const Schema& schema, const Label& loop);

/// Checks the index/output set conditions on the level blocks of a
/// separated loop (the first level and an empty kernel are exempt from the
/// "must read the previous level" half).
bool level_conditions(const SeparatedLoop& sep);

struct DepthReport {
  int depth = 0;                    // deepest Cell nesting in kernel index positions
  std::size_t controller_count = 0;
  std::size_t kernel_accesses = 0;  // indexed kernel accesses observed
  bool consistent = false;          // depth == controller_count - 1
};

/// Herbrand-runs the rebuilt schema and measures the kernel's array index
/// terms during the first pass of the loop. Throws SchemaError when the run
/// does not finish.
DepthReport verify_controller_count(const SeparatedLoop& sep, const Diagram& diagram,
                                    std::uint64_t fuel, const Memory& preset = {});

}  // namespace schemapar
