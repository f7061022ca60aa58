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

// Text form of schemas (`.sch` files).
//
//   // comment
//   semantics predecessors;          (optional)
//   aux pc1, vLeb1;                  (optional)
//   proc P { ...statements... final l; }
//   l1: x = f(y, a[i+1]) then l2;
//   l2: x = y then l3;               (copy)
//   l3: v = @l1 then l4;             (label constant)
//   l4: if p(x) then l5 else l6;
//   l5: if v == @l1 then l6 else l7;
//   l6: do P while p(x) then l7;     (do-while; `while v != @l` also works)
//   l7: do { ... final m; } then l8; (call of an inline body)
//   l8: for (k = 1; k < N+1 && k < M; k++) { ... final kf; } then lf;
//   final lf;
//
// The final label may be omitted when exactly one output label of a block is
// not an input label.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "schemapar/schema.hpp"

namespace schemapar {

struct SourceSpan {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based
  std::size_t length = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public SchemaError {
 public:
  ParseError(SourceSpan span, const std::string& message);
  const SourceSpan& span() const { return span_; }
  /// Message without the `line:column:` prefix.
  const std::string& detail() const { return detail_; }

 private:
  SourceSpan span_;
  std::string detail_;
};

/// Parses and validates; the first validation issue becomes a ParseError
/// located at the offending label.
Schema parse_schema(std::string_view text);

/// Parses without running validate (used to inspect ill-formed inputs).
Schema parse_schema_unchecked(std::string_view text);

std::string pretty_print(const Schema& schema);

/// Reads a whole file; throws SchemaError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace schemapar
