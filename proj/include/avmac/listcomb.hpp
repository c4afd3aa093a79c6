#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "avmac/util.hpp"

namespace avmac::listcomb {

// Subset of the M x M message-pair grid; coordinates are 1-based.
struct CellSet {
  int m = 0;
  std::vector<std::pair<int, int>> cells;

  static CellSet of(int m, std::vector<std::pair<int, int>> cells) {
    CellSet k;
    k.m = m;
    std::sort(cells.begin(), cells.end());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto [r, c] = cells[i];
      if (r < 1 || r > m || c < 1 || c > m)
        throw Error(Errc::symbol_out_of_range, "cell outside the grid");
      if (i > 0 && cells[i] == cells[i - 1]) throw Error(Errc::bad_argument, "duplicate cell");
    }
    k.cells = std::move(cells);
    return k;
  }

  std::vector<int> rows_present() const {
    std::set<int> r;
    for (auto& c : cells) r.insert(c.first);
    return {r.begin(), r.end()};
  }
  std::vector<int> cols_present() const {
    std::set<int> r;
    for (auto& c : cells) r.insert(c.second);
    return {r.begin(), r.end()};
  }
};

// A cells with pairwise distinct rows and columns exist in K, i.e. the
// bipartite row/column graph with cells as edges has a matching of size >= A.
inline bool contains_diagonal(const CellSet& k, int a) {
  if (a < 1) throw Error(Errc::bad_argument, "A must be >= 1");
  if (int(k.cells.size()) < a) return false;
  auto rows = k.rows_present();
  auto cols = k.cols_present();
  if (int(rows.size()) < a || int(cols.size()) < a) return false;

  std::vector<std::vector<int>> adj(rows.size());
  for (auto& [r, c] : k.cells) {
    int ri = int(std::lower_bound(rows.begin(), rows.end(), r) - rows.begin());
    int ci = int(std::lower_bound(cols.begin(), cols.end(), c) - cols.begin());
    adj[std::size_t(ri)].push_back(ci);
  }
  std::vector<int> match_col(cols.size(), -1);
  std::vector<int> seen(cols.size(), -1);
  std::function<bool(int, int)> augment = [&](int r, int stamp) {
    for (int c : adj[std::size_t(r)]) {
      if (seen[std::size_t(c)] == stamp) continue;
      seen[std::size_t(c)] = stamp;
      if (match_col[std::size_t(c)] < 0 || augment(match_col[std::size_t(c)], stamp)) {
        match_col[std::size_t(c)] = r;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int r = 0; r < int(rows.size()); ++r) {
    if (augment(r, r)) ++matched;
    if (matched >= a) return true;
  }
  return false;
}

// A full product I x J inside K with |I| * |J| >= A. Row subsets up to size A
// suffice: a larger working subset keeps a nonempty column intersection on
// any A of its rows.
inline bool contains_rectangle(const CellSet& k, int a) {
  if (a < 1) throw Error(Errc::bad_argument, "A must be >= 1");
  auto rows = k.rows_present();
  std::vector<std::vector<int>> row_cols(rows.size());
  for (auto& [r, c] : k.cells) {
    int ri = int(std::lower_bound(rows.begin(), rows.end(), r) - rows.begin());
    row_cols[std::size_t(ri)].push_back(c);
  }
  for (auto& rc : row_cols) std::sort(rc.begin(), rc.end());

  std::function<bool(std::size_t, int, const std::vector<int>&)> rec =
      [&](std::size_t next, int picked, const std::vector<int>& inter) -> bool {
    if (picked > 0 && picked * int(inter.size()) >= a) return true;
    if (picked >= a) return false;
    for (std::size_t r = next; r < row_cols.size(); ++r) {
      std::vector<int> ni;
      if (picked == 0) {
        ni = row_cols[r];
      } else {
        std::set_intersection(inter.begin(), inter.end(), row_cols[r].begin(), row_cols[r].end(),
                              std::back_inserter(ni));
      }
      if (ni.empty()) continue;
      if (rec(r + 1, picked + 1, ni)) return true;
    }
    return false;
  };
  return rec(0, 0, {});
}

struct SearchResult {
  int size = 0;
  CellSet witness;
  bool exact = true;  // search completed within budget
  long nodes = 0;
};

// Maximum cardinality of a subset of [M]^2 containing no A-diagonal and no
// A-rectangle. Backtracking over cells in lexicographic order; row and
// column permutation symmetry is broken by requiring indices to appear in
// first-use order. Sets reaching (A-1)^2+1 would contradict the extremal
// bound; the search records them rather than assuming they cannot exist.
inline SearchResult max_avoiding_set(int a, int m, long budget = 50000000) {
  if (a < 1 || m < 1) throw Error(Errc::bad_argument, "A and M must be >= 1");
  const int total = m * m;
  const int hard_cap = (a - 1) * (a - 1) + 1;

  SearchResult res;
  res.witness = CellSet::of(m, {});
  std::vector<std::pair<int, int>> cur;
  bool out_of_budget = false;

  std::function<void(int, int, int)> rec = [&](int next_cell, int max_row, int max_col) {
    if (out_of_budget) return;
    if (int(cur.size()) > res.size) {
      res.size = int(cur.size());
      res.witness = CellSet::of(m, cur);
    }
    if (int(cur.size()) >= hard_cap) return;
    for (int cell = next_cell; cell < total; ++cell) {
      if (int(cur.size()) + (total - cell) <= res.size) break;  // cannot beat the incumbent
      int r = cell / m + 1, c = cell % m + 1;
      if (r > max_row + 1) break;      // rows only grow along the scan
      if (c > max_col + 1) continue;   // columns must appear in first-use order
      if (++res.nodes > budget) {
        out_of_budget = true;
        return;
      }
      cur.emplace_back(r, c);
      CellSet k = CellSet::of(m, cur);
      if (!contains_diagonal(k, a) && !contains_rectangle(k, a))
        rec(cell + 1, std::max(max_row, r), std::max(max_col, c));
      cur.pop_back();
      if (out_of_budget) return;
    }
  };
  rec(0, 0, 0);
  res.exact = !out_of_budget;
  return res;
}

struct GValue {
  int a = 0;
  int lower = 0;      // 1 + best avoiding size found (clamped to >= A)
  int upper = 0;      // (A-1)^2 + 1
  bool exact = false;  // search complete and lower meets upper
  CellSet witness;    // avoiding set of size lower-1
  long nodes = 0;
};

// Least set size that forces an A-diagonal or A-rectangle. The paper-side
// upper bound (A-1)^2+1 is M-independent; the search provides the lower
// bound over grids up to M_max.
inline GValue g_of(int a, int m_max = 6, long budget = 50000000) {
  if (a < 1) throw Error(Errc::bad_argument, "A must be >= 1");
  GValue g;
  g.a = a;
  g.upper = (a - 1) * (a - 1) + 1;
  auto search = max_avoiding_set(a, m_max, budget);
  g.nodes = search.nodes;
  g.lower = std::max(a, search.size + 1);
  g.witness = search.witness;
  if (g.lower > g.upper)
    throw Error(Errc::solver_failure,
                "avoiding set of size " + std::to_string(search.size) + " contradicts the extremal bound");
  g.exact = search.exact && g.lower == g.upper;
  return g;
}

struct FValue {
  int u = 0;
  int lower = 0, upper = 0;
  bool exact = false;
};

inline FValue f_of(int u, int m_max = 6, long budget = 50000000) {
  if (u < 0) throw Error(Errc::bad_argument, "u must be >= 0");
  auto g = g_of(u + 2, m_max, budget);
  FValue f;
  f.u = u;
  f.lower = g.lower - 1;
  f.upper = g.upper - 1;
  f.exact = g.exact;
  if (f.upper != (u + 1) * (u + 1))
    throw Error(Errc::solver_failure, "f(u) bound disagrees with (u+1)^2");
  return f;
}

}  // namespace avmac::listcomb
