// Copyright 2026 The peecs Authors.
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

#ifndef PEECS_ASSIGNMENT_HPP_
#define PEECS_ASSIGNMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "peecs/rfs_types.hpp"

namespace peecs {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// Dense row-major cost matrix. +infinity marks a forbidden pair.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw Error("cost matrix data size mismatch");
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  [[nodiscard]] CostMatrix transposed() const {
    CostMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
  }

 private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> data_;
};

/// Row-to-column assignment. Entries are column indices, or -1 for an unassigned row.
struct Assignment {
  std::vector<int> row_to_col;
  double cost{0.0};
};

namespace detail {

// Cost paired with a secondary key that encodes the lexicographic rank of the
// assignment vector. Both parts are integers or plain sums of the inputs, so
// the dual updates of the solver stay exact for the secondary part.
struct LexCost {
  double primary{0.0};
  double secondary{0.0};

  friend LexCost operator+(LexCost a, LexCost b) noexcept {
    return {a.primary + b.primary, a.secondary + b.secondary};
  }
  friend LexCost operator-(LexCost a, LexCost b) noexcept {
    return {a.primary - b.primary, a.secondary - b.secondary};
  }
  friend bool operator<(LexCost a, LexCost b) noexcept {
    if (a.primary != b.primary) return a.primary < b.primary;
    return a.secondary < b.secondary;
  }
};

// Shortest-augmenting-path Hungarian method for rows <= cols. Entries equal to
// +infinity are never used. Returns std::nullopt when no complete row
// assignment exists. When `lexicographic` is set and the key range fits in a
// double mantissa, ties in cost are resolved towards the lexicographically
// smallest row-to-column vector.
inline std::optional<std::vector<int>> solve_rows(const CostMatrix& cost, bool lexicographic) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0) return std::vector<int>{};
  if (n > m) return std::nullopt;

  std::vector<double> place(n, 0.0);
  if (lexicographic) {
    double scale = 1.0;
    bool fits = true;
    for (std::size_t i = n; i-- > 0;) {
      place[i] = scale;
      scale *= static_cast<double>(m);
      if (scale > 4.0e15) {
        fits = false;
        break;
      }
    }
    if (!fits) std::fill(place.begin(), place.end(), 0.0);
  }
  auto entry = [&](std::size_t i, std::size_t j) -> LexCost {
    return {cost(i - 1, j - 1), place[i - 1] * static_cast<double>(j - 1)};
  };

  const LexCost inf{kInfeasible, 0.0};
  std::vector<LexCost> u(n + 1), v(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<LexCost> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      LexCost delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const LexCost a = entry(i0, j);
        if (a.primary != kInfeasible) {
          const LexCost cur = a - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (delta.primary == kInfeasible) return std::nullopt;
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] = u[p[j]] + delta;
          v[j] = v[j] - delta;
        } else if (minv[j].primary != kInfeasible) {
          minv[j] = minv[j] - delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

// Sum in row order so equal assignments always report bit-identical costs.
inline double assignment_cost(const CostMatrix& cost, const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) total += cost(i, static_cast<std::size_t>(row_to_col[i]));
  }
  return total;
}

}  // namespace detail

/// Minimum-cost assignment of min(rows, cols) pairs. Works for either shape;
/// rows left unassigned (rows > cols) carry -1. Returns std::nullopt when
/// forbidden entries leave no complete assignment.
[[nodiscard]] inline std::optional<Assignment> optimal_assignment(const CostMatrix& cost) {
  if (cost.rows() <= cost.cols()) {
    auto rows = detail::solve_rows(cost, /*lexicographic=*/false);
    if (!rows) return std::nullopt;
    const double total = detail::assignment_cost(cost, *rows);
    return Assignment{std::move(*rows), total};
  }
  auto cols = detail::solve_rows(cost.transposed(), /*lexicographic=*/false);
  if (!cols) return std::nullopt;
  std::vector<int> row_to_col(cost.rows(), -1);
  for (std::size_t j = 0; j < cols->size(); ++j) {
    row_to_col[static_cast<std::size_t>((*cols)[j])] = static_cast<int>(j);
  }
  const double total = detail::assignment_cost(cost, row_to_col);
  return Assignment{std::move(row_to_col), total};
}

/// Murty's ranked assignment: the `max_count` cheapest complete row
/// assignments of an n x m matrix (n <= m), in non-decreasing cost. Equal
/// costs are ordered by the lexicographic order of the row-to-column vector.
/// An empty matrix has exactly one (empty) assignment of cost 0.
[[nodiscard]] inline std::vector<Assignment> ranked_assignments(const CostMatrix& cost,
                                                                std::size_t max_count) {
  std::vector<Assignment> out;
  if (max_count == 0) return out;
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0) {
    out.push_back(Assignment{{}, 0.0});
    return out;
  }
  if (n > m) return out;

  struct Node {
    std::vector<int> solution;
    double cost{0.0};
    std::vector<int> forced;                 // per row: forced column or -1
    std::vector<std::vector<int>> excluded;  // per row: forbidden columns
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.solution > b.solution;
  };

  // Solves the subproblem with `forced` pairs fixed and `excluded` pairs removed.
  auto solve = [&](const std::vector<int>& forced,
                   const std::vector<std::vector<int>>& excluded) -> std::optional<std::vector<int>> {
    std::vector<char> col_taken(m, 0);
    std::vector<std::size_t> free_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (forced[i] >= 0) {
        col_taken[static_cast<std::size_t>(forced[i])] = 1;
      } else {
        free_rows.push_back(i);
      }
    }
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < m; ++j) {
      if (!col_taken[j]) free_cols.push_back(j);
    }
    CostMatrix sub(free_rows.size(), free_cols.size());
    for (std::size_t a = 0; a < free_rows.size(); ++a) {
      for (std::size_t b = 0; b < free_cols.size(); ++b) {
        sub(a, b) = cost(free_rows[a], free_cols[b]);
      }
      for (const int j : excluded[free_rows[a]]) {
        const auto it = std::lower_bound(free_cols.begin(), free_cols.end(),
                                         static_cast<std::size_t>(j));
        if (it != free_cols.end() && *it == static_cast<std::size_t>(j)) {
          sub(a, static_cast<std::size_t>(it - free_cols.begin())) = kInfeasible;
        }
      }
    }
    auto sub_solution = detail::solve_rows(sub, /*lexicographic=*/true);
    if (!sub_solution) return std::nullopt;
    std::vector<int> full = forced;
    for (std::size_t a = 0; a < free_rows.size(); ++a) {
      full[free_rows[a]] = static_cast<int>(free_cols[static_cast<std::size_t>((*sub_solution)[a])]);
    }
    return full;
  };

  std::priority_queue<Node, std::vector<Node>, decltype(worse)> queue(worse);
  {
    Node root;
    root.forced.assign(n, -1);
    root.excluded.assign(n, {});
    auto first = solve(root.forced, root.excluded);
    if (!first) return out;
    root.cost = detail::assignment_cost(cost, *first);
    root.solution = std::move(*first);
    queue.push(std::move(root));
  }

  while (!queue.empty() && out.size() < max_count) {
    Node node = queue.top();
    queue.pop();
    out.push_back(Assignment{node.solution, node.cost});
    if (out.size() == max_count) break;

    // Partition the remaining solutions of this node.
    std::vector<int> forced = node.forced;
    for (std::size_t i = 0; i < n; ++i) {
      if (node.forced[i] >= 0) continue;
      std::vector<std::vector<int>> excluded = node.excluded;
      excluded[i].push_back(node.solution[i]);
      if (auto child = solve(forced, excluded)) {
        Node next;
        next.cost = detail::assignment_cost(cost, *child);
        next.solution = std::move(*child);
        next.forced = forced;
        next.excluded = std::move(excluded);
        queue.push(std::move(next));
      }
      forced[i] = node.solution[i];
    }
  }
  return out;
}

}  // namespace peecs

#endif  // PEECS_ASSIGNMENT_HPP_
