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

// Structural well-formedness checks.

#pragma once

#include <string>
#include <vector>

#include "schemapar/schema.hpp"

namespace schemapar {

struct ValidationIssue {
  Label label;  // offending label, or empty for schema-wide issues
  std::string message;
  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Reports every violated invariant in a deterministic order. Never throws.
ValidationReport validate(const Schema& schema);

}  // namespace schemapar
