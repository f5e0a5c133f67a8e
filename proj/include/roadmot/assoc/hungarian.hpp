#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "roadmot/costs/cost_matrix.hpp"

namespace roadmot {

// Result of a two-frame assignment. Pairs are sorted by row; gated entries
// are never part of a pair.
struct Assignment {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;
};

namespace detail {

// Padding cost for square-ification; gated entries cost twice as much so a
// padded slot is always preferred over a forbidden pair. kPad must dominate
// the largest possible sum of real costs (all real costs live in [0, 1]).
inline constexpr double kPad = 1.0e4;

// Jonker-Volgenant style shortest augmenting path solve of the square
// assignment problem (O(n^3)). Returns the column per row and the dual
// potentials, which certify optimality via complementary slackness.
inline void solve_square(const std::vector<double>& a, int n,
                         std::vector<int>& rowsol, std::vector<double>& u,
                         std::vector<double>& v) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pu(n + 1, 0.0), pv(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), char(0));
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[size_t(i0 - 1) * n + (j - 1)] - pu[i0] - pv[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          pu[p[j]] += delta;
          pv[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  rowsol.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j]) rowsol[p[j] - 1] = j - 1;
  }
  u.assign(n, 0.0);
  v.assign(n, 0.0);
  for (int i = 0; i < n; ++i) u[i] = pu[i + 1];
  for (int j = 0; j < n; ++j) v[j] = pv[j + 1];
}

// Kuhn augmenting-path matching over an adjacency list; returns true when
// every row can be matched.
struct TightMatcher {
  const std::vector<std::vector<int>>* adj = nullptr;
  int n = 0;
  std::vector<int> col_of_row, row_of_col;
  std::vector<char> seen;

  bool augment(int row) {
    for (int j : (*adj)[row]) {
      if (seen[j]) continue;
      seen[j] = 1;
      if (row_of_col[j] < 0 || augment(row_of_col[j])) {
        col_of_row[row] = j;
        row_of_col[j] = row;
        return true;
      }
    }
    return false;
  }

  bool perfect(const std::vector<std::vector<int>>& adjacency, int size) {
    adj = &adjacency;
    n = size;
    col_of_row.assign(n, -1);
    row_of_col.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      seen.assign(n, 0);
      if (!augment(i)) return false;
    }
    return true;
  }
};

}  // namespace detail

// Minimum-cost assignment avoiding GATED pairs, maximizing the number of
// matched pairs first. Ties between equal-cost optima are broken toward the
// lexicographically smallest pair list, which pins the output for golden
// tests. Complexity O(n^3) for the solve plus a canonicalization pass over
// the zero-reduced-cost subgraph.
inline Assignment hungarian(const CostMatrix& m) {
  Assignment out;
  const int r = m.rows, c = m.cols;
  if (r == 0 || c == 0) {
    for (int i = 0; i < r; ++i) out.unmatched_rows.push_back(i);
    for (int j = 0; j < c; ++j) out.unmatched_cols.push_back(j);
    return out;
  }

  const int n = std::max(r, c);
  std::vector<double> a(size_t(n) * n, detail::kPad);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const double v = m.at(i, j);
      a[size_t(i) * n + j] = is_gated(v) ? 2.0 * detail::kPad : v;
    }
  }

  std::vector<int> rowsol;
  std::vector<double> u, v;
  detail::solve_square(a, n, rowsol, u, v);

  // Zero-reduced-cost (tight) edges support every optimal assignment; a
  // perfect matching inside them is optimal. Greedily re-match rows in order
  // to the smallest usable column while a perfect completion still exists.
  std::vector<std::vector<int>> adj(n);
  auto tight = [&](int i, int j) {
    const double cost = a[size_t(i) * n + j];
    return cost - u[i] - v[j] <= 1e-9 * std::max(1.0, std::abs(cost));
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (tight(i, j)) adj[i].push_back(j);
    }
  }

  detail::TightMatcher matcher;
  std::vector<int> forced(n, -1);
  for (int i = 0; i < std::min(r, n); ++i) {
    auto usable = [&](int j) {
      return std::none_of(forced.begin(), forced.begin() + i,
                          [&](int f) { return f == j; });
    };
    // Candidate columns: real non-gated first (ascending), then one synthetic
    // "unmatched" option covering padding columns and gated entries.
    std::vector<std::vector<int>> restricted = adj;
    bool done = false;
    for (int j : adj[i]) {
      if (j >= c || is_gated(m.at(i, j)) || !usable(j)) continue;
      restricted[i] = {j};
      for (int k = 0; k < i; ++k) restricted[k] = {forced[k]};
      if (matcher.perfect(restricted, n)) {
        forced[i] = j;
        done = true;
        break;
      }
    }
    if (!done) {
      std::vector<int> rest;
      for (int j : adj[i]) {
        if ((j >= c || is_gated(m.at(i, j))) && usable(j)) rest.push_back(j);
      }
      restricted[i] = rest;
      for (int k = 0; k < i; ++k) restricted[k] = {forced[k]};
      if (matcher.perfect(restricted, n)) {
        forced[i] = matcher.col_of_row[i];
      } else {
        forced[i] = rowsol[i];  // fall back to the raw solve
      }
    }
  }

  std::vector<char> col_used(c, 0);
  for (int i = 0; i < r; ++i) {
    const int j = forced[i] >= 0 ? forced[i] : rowsol[i];
    if (j >= 0 && j < c && !is_gated(m.at(i, j))) {
      out.pairs.emplace_back(i, j);
      out.total_cost += m.at(i, j);
      col_used[j] = 1;
    } else {
      out.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < c; ++j) {
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

}  // namespace roadmot
