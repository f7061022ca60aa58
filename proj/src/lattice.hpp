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

// Integer solutions of linear systems A x = b and their enumeration inside a
// box.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace schemapar::lattice {

using Vec = std::vector<std::int64_t>;
using Mat = std::vector<Vec>;  // row-major

struct Solution {
  bool empty = true;
  Vec particular;
  Mat generators;  // each of size ncols; a basis of the kernel lattice
};

/// All integer x with A x = b. A has `ncols` columns (A may have no rows).
/// Throws std::overflow_error if an intermediate value does not fit.
Solution solve(const Mat& a, const Vec& b, std::size_t ncols);

/// Row-echelon basis of the same lattice: leading coordinates strictly
/// increase and leading entries are positive.
Mat echelon(Mat basis);

/// Calls `visit` for every lattice point with lo <= x <= hi componentwise.
/// Stops and returns false once more than `cap` search nodes were expanded.
bool enumerate(const Solution& s, const Vec& lo, const Vec& hi, std::uint64_t cap,
               const std::function<void(const Vec&)>& visit);

}  // namespace schemapar::lattice
