/*
 Copyright 2026 The bytegan Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Hilbert curve index <-> grid coordinate mapping.
//
// Orientation convention: the order-1 motif visits (0,0) -> (0,1) -> (1,1) -> (1,0)
// (x first, then y). Higher orders place a transposed copy in the first quadrant,
// two identity copies in the middle quadrants and an anti-transposed copy in the
// last one.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bytegan/common.hpp"

namespace bytegan {

struct GridPoint {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

class HilbertOrder {
 public:
  static constexpr unsigned kMaxOrder = 16;

  explicit HilbertOrder(unsigned n) : n_(n) {
    if (n < 1 || n > kMaxOrder) {
      throw Error("hilbert order must be in [1, " + std::to_string(kMaxOrder) + "], got " +
                  std::to_string(n));
    }
  }

  unsigned n() const { return n_; }
  std::uint32_t side() const { return std::uint32_t{1} << n_; }
  std::uint64_t capacity() const { return std::uint64_t{1} << (2 * n_); }

  friend bool operator==(const HilbertOrder&, const HilbertOrder&) = default;

 private:
  unsigned n_;
};

/// Curve index -> cell. Throws when d >= capacity.
inline GridPoint hilbert_d2xy(HilbertOrder order, std::uint64_t d) {
  if (d >= order.capacity()) {
    throw Error("hilbert index " + std::to_string(d) + " out of range for order " +
                std::to_string(order.n()));
  }
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint64_t t = d;
  for (std::uint32_t s = 1; s < order.side(); s <<= 1) {
    const std::uint32_t rx = 1 & static_cast<std::uint32_t>(t >> 1);
    const std::uint32_t ry = 1 & static_cast<std::uint32_t>(t ^ rx);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
    x += s * rx;
    y += s * ry;
    t >>= 2;
  }
  return {x, y};
}

/// Cell -> curve index. Throws when x or y is outside the grid.
inline std::uint64_t hilbert_xy2d(HilbertOrder order, std::uint32_t x, std::uint32_t y) {
  const std::uint32_t side = order.side();
  if (x >= side || y >= side) {
    throw Error("grid coordinate (" + std::to_string(x) + "," + std::to_string(y) +
                ") out of range for side " + std::to_string(side));
  }
  std::uint64_t d = 0;
  for (std::uint32_t s = side >> 1; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) > 0 ? 1 : 0;
    const std::uint32_t ry = (y & s) > 0 ? 1 : 0;
    d += std::uint64_t{s} * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = side - 1 - x;
        y = side - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

/// Smallest order whose capacity holds n_symbols cells (minimum order 1).
inline HilbertOrder choose_order(std::uint64_t n_symbols) {
  if (n_symbols == 0) throw Error("cannot size a hilbert grid for zero symbols");
  unsigned n = 1;
  while ((std::uint64_t{1} << (2 * n)) < n_symbols) {
    ++n;
    if (n > HilbertOrder::kMaxOrder) {
      throw Error("stream of " + std::to_string(n_symbols) + " symbols exceeds the largest grid");
    }
  }
  return HilbertOrder(n);
}

namespace detail {

// Symmetries of a square that map one Hilbert sub-curve onto another.
enum class Orient : std::uint8_t { identity = 0, transpose = 1, anti_transpose = 2, half_turn = 3 };

inline GridPoint apply(Orient o, std::uint32_t side, GridPoint p) {
  switch (o) {
    case Orient::identity:
      return p;
    case Orient::transpose:
      return {p.y, p.x};
    case Orient::anti_transpose:
      return {side - 1 - p.y, side - 1 - p.x};
    case Orient::half_turn:
      return {side - 1 - p.x, side - 1 - p.y};
  }
  return p;
}

// compose(a, b) applies b first, then a.
inline Orient compose(Orient a, Orient b) {
  static constexpr Orient table[4][4] = {
      {Orient::identity, Orient::transpose, Orient::anti_transpose, Orient::half_turn},
      {Orient::transpose, Orient::identity, Orient::half_turn, Orient::anti_transpose},
      {Orient::anti_transpose, Orient::half_turn, Orient::identity, Orient::transpose},
      {Orient::half_turn, Orient::anti_transpose, Orient::transpose, Orient::identity},
  };
  return table[static_cast<int>(a)][static_cast<int>(b)];
}

inline constexpr unsigned kLeafOrder = 4;

// Offsets of an order-k curve (k <= kLeafOrder) under each orientation.
inline const std::vector<GridPoint>& leaf_table(unsigned k, Orient o) {
  static const auto tables = [] {
    std::array<std::array<std::vector<GridPoint>, 4>, kLeafOrder + 1> t;
    for (unsigned k = 1; k <= kLeafOrder; ++k) {
      const HilbertOrder order(k);
      for (int oi = 0; oi < 4; ++oi) {
        auto& v = t[k][oi];
        v.reserve(order.capacity());
        for (std::uint64_t d = 0; d < order.capacity(); ++d) {
          v.push_back(apply(static_cast<Orient>(oi), order.side(), hilbert_d2xy(order, d)));
        }
      }
    }
    return t;
  }();
  return tables[k][static_cast<int>(o)];
}

template <class Emit>
void walk(unsigned k, std::uint32_t x0, std::uint32_t y0, Orient o, std::uint64_t& d,
          std::uint64_t limit, Emit& emit) {
  if (d >= limit) return;
  if (k <= kLeafOrder) {
    const auto& tab = leaf_table(k, o);
    const std::uint64_t count = std::min<std::uint64_t>(tab.size(), limit - d);
    for (std::uint64_t i = 0; i < count; ++i) {
      emit(d + i, x0 + tab[i].x, y0 + tab[i].y);
    }
    d += count;
    return;
  }
  static constexpr GridPoint quadrant[4] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  static constexpr Orient child[4] = {Orient::transpose, Orient::identity, Orient::identity,
                                      Orient::anti_transpose};
  const std::uint32_t half = std::uint32_t{1} << (k - 1);
  for (int q = 0; q < 4; ++q) {
    const GridPoint qp = apply(o, 2, quadrant[q]);
    walk(k - 1, x0 + half * qp.x, y0 + half * qp.y, compose(o, child[q]), d, limit, emit);
    if (d >= limit) return;
  }
}

}  // namespace detail

/// Visits curve cells in index order, calling emit(d, x, y) for every d < limit.
/// Equivalent to calling hilbert_d2xy for each d, at a fraction of the cost.
template <class Emit>
void walk_hilbert(HilbertOrder order, std::uint64_t limit, Emit&& emit) {
  limit = std::min(limit, order.capacity());
  std::uint64_t d = 0;
  detail::walk(order.n(), 0, 0, detail::Orient::identity, d, limit, emit);
}

}  // namespace bytegan
