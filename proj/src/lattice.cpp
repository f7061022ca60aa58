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

#include "lattice.hpp"

#include <cstdlib>
#include <utility>

#include "checked.hpp"

namespace schemapar::lattice {

namespace {

using checked::add_or_throw;
using checked::mul_or_throw;
using checked::sub_or_throw;

struct Egcd {
  std::int64_t g, x, y;  // g = a*x + b*y, g >= 0
};

Egcd egcd(std::int64_t a, std::int64_t b) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t tmp = sub_or_throw(old_r, mul_or_throw(q, r));
    old_r = r;
    r = tmp;
    tmp = sub_or_throw(old_s, mul_or_throw(q, s));
    old_s = s;
    s = tmp;
    tmp = sub_or_throw(old_t, mul_or_throw(q, t));
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Column operation on the pair (i, j) of every row of m:
//   col_i' = p*col_i + q*col_j,  col_j' = r*col_i + s*col_j
void combine_columns(Mat& m, std::size_t i, std::size_t j, std::int64_t p, std::int64_t q, std::int64_t r,
                     std::int64_t s) {
  for (auto& row : m) {
    std::int64_t ci = row[i], cj = row[j];
    row[i] = add_or_throw(mul_or_throw(p, ci), mul_or_throw(q, cj));
    row[j] = add_or_throw(mul_or_throw(r, ci), mul_or_throw(s, cj));
  }
}

}  // namespace

Solution solve(const Mat& a, const Vec& b, std::size_t ncols) {
  Mat h = a;
  Mat u(ncols, Vec(ncols, 0));
  for (std::size_t i = 0; i < ncols; ++i) u[i][i] = 1;

  // Column echelon form H = A U with U unimodular.
  std::vector<std::size_t> pivot_of_row(h.size(), ncols);
  std::size_t col = 0;
  for (std::size_t r = 0; r < h.size() && col < ncols; ++r) {
    for (std::size_t j = col + 1; j < ncols; ++j) {
      if (h[r][j] == 0) continue;
      if (h[r][col] == 0) {
        for (auto& row : h) std::swap(row[col], row[j]);
        for (auto& row : u) std::swap(row[col], row[j]);
        continue;
      }
      Egcd e = egcd(h[r][col], h[r][j]);
      std::int64_t a_over = h[r][col] / e.g, b_over = h[r][j] / e.g;
      // [x  -b/g]
      // [y   a/g]  has determinant 1.
      combine_columns(h, col, j, e.x, e.y, -b_over, a_over);
      combine_columns(u, col, j, e.x, e.y, -b_over, a_over);
    }
    if (h[r][col] != 0) {
      pivot_of_row[r] = col;
      ++col;
    }
  }
  std::size_t rank = col;

  Solution out;
  Vec y(ncols, 0);
  for (std::size_t r = 0; r < h.size(); ++r) {
    std::int64_t rest = b[r];
    std::size_t limit = pivot_of_row[r] == ncols ? rank : pivot_of_row[r];
    for (std::size_t j = 0; j < limit; ++j) rest = sub_or_throw(rest, mul_or_throw(h[r][j], y[j]));
    if (pivot_of_row[r] == ncols) {
      if (rest != 0) return out;
      continue;
    }
    std::int64_t piv = h[r][pivot_of_row[r]];
    if (rest % piv != 0) return out;
    y[pivot_of_row[r]] = rest / piv;
  }
  out.empty = false;
  out.particular.assign(ncols, 0);
  for (std::size_t i = 0; i < ncols; ++i) {
    for (std::size_t j = 0; j < rank; ++j) {
      out.particular[i] = add_or_throw(out.particular[i], mul_or_throw(u[i][j], y[j]));
    }
  }
  for (std::size_t j = rank; j < ncols; ++j) {
    Vec g(ncols);
    for (std::size_t i = 0; i < ncols; ++i) g[i] = u[i][j];
    out.generators.push_back(std::move(g));
  }
  return out;
}

Mat echelon(Mat basis) {
  if (basis.empty()) return basis;
  std::size_t n = basis.front().size();
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < basis.size(); ++c) {
    for (std::size_t k = row + 1; k < basis.size(); ++k) {
      if (basis[k][c] == 0) continue;
      if (basis[row][c] == 0) {
        std::swap(basis[row], basis[k]);
        continue;
      }
      Egcd e = egcd(basis[row][c], basis[k][c]);
      std::int64_t a_over = basis[row][c] / e.g, b_over = basis[k][c] / e.g;
      Vec top(n), bottom(n);
      for (std::size_t i = 0; i < n; ++i) {
        top[i] = add_or_throw(mul_or_throw(e.x, basis[row][i]), mul_or_throw(e.y, basis[k][i]));
        bottom[i] = sub_or_throw(mul_or_throw(a_over, basis[k][i]), mul_or_throw(b_over, basis[row][i]));
      }
      basis[row] = std::move(top);
      basis[k] = std::move(bottom);
    }
    if (basis[row][c] != 0) {
      if (basis[row][c] < 0) {
        for (auto& v : basis[row]) v = -v;
      }
      ++row;
    }
  }
  basis.resize(row);
  return basis;
}

bool enumerate(const Solution& s, const Vec& lo, const Vec& hi, std::uint64_t cap,
               const std::function<void(const Vec&)>& visit) {
  if (s.empty) return true;
  std::size_t n = s.particular.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (lo[i] > hi[i]) return true;
  }
  Mat basis = echelon(s.generators);
  std::vector<std::size_t> lead;
  for (const auto& g : basis) {
    std::size_t c = 0;
    while (g[c] == 0) ++c;
    lead.push_back(c);
  }
  std::uint64_t nodes = 0;
  bool within = true;
  Vec x = s.particular;
  // Coordinates are fixed left to right; generator k first touches
  // coordinate lead[k], where its multiple is chosen.
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t coord, std::size_t next_gen) {
    if (!within) return;
    if (++nodes > cap) {
      within = false;
      return;
    }
    if (coord == n) {
      visit(x);
      return;
    }
    if (next_gen < basis.size() && lead[next_gen] == coord) {
      const Vec& g = basis[next_gen];
      std::int64_t first = ceil_div(sub_or_throw(lo[coord], x[coord]), g[coord]);
      std::int64_t last = floor_div(sub_or_throw(hi[coord], x[coord]), g[coord]);
      for (std::int64_t t = first; t <= last && within; ++t) {
        for (std::size_t i = coord; i < n; ++i) x[i] = add_or_throw(x[i], mul_or_throw(t, g[i]));
        walk(coord + 1, next_gen + 1);
        for (std::size_t i = coord; i < n; ++i) x[i] = sub_or_throw(x[i], mul_or_throw(t, g[i]));
      }
      return;
    }
    if (x[coord] < lo[coord] || x[coord] > hi[coord]) return;
    walk(coord + 1, next_gen);
  };
  walk(0, 0);
  return within;
}

}  // namespace schemapar::lattice
