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

// Index / argument / output variable sets of instructions and blocks.

#pragma once

#include <set>
#include <string>

#include "schemapar/schema.hpp"

namespace schemapar {

struct VarSets {
  std::set<Variable> ind;
  std::set<Variable> arg;
  std::set<Variable> val;

  VarSets& operator|=(const VarSets& other);
  friend bool operator==(const VarSets&, const VarSets&) = default;
};

/// Sets of one instruction. Loop and Call instructions summarize their body
/// (recursively). A loop's predicate contributes its arguments to `arg` but
/// no index variables; a counted loop reads and writes its counter.
VarSets var_sets(const Schema& schema, const Instruction& instr);

/// Union over the instructions of one block (and, through them, their bodies).
VarSets var_sets_block(const Schema& schema, const std::string& block);

/// Union over every instruction of the schema, sub-schemas included.
VarSets var_sets_schema(const Schema& schema);

/// Names of the simple variables in a set (index sets hold only those).
std::set<std::string> names_of(const std::set<Variable>& vars);

/// Simple variable names written by a set of output variables.
std::set<std::string> simple_names(const std::set<Variable>& vars);

}  // namespace schemapar
