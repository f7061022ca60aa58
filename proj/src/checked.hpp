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

// Overflow-checked 64-bit arithmetic.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace schemapar::checked {

inline std::optional<std::int64_t> add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::optional<std::int64_t> sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::optional<std::int64_t> mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::int64_t add_or_throw(std::int64_t a, std::int64_t b) {
  if (auto r = add(a, b)) return *r;
  throw std::overflow_error("integer overflow");
}

inline std::int64_t sub_or_throw(std::int64_t a, std::int64_t b) {
  if (auto r = sub(a, b)) return *r;
  throw std::overflow_error("integer overflow");
}

inline std::int64_t mul_or_throw(std::int64_t a, std::int64_t b) {
  if (auto r = mul(a, b)) return *r;
  throw std::overflow_error("integer overflow");
}

}  // namespace schemapar::checked
