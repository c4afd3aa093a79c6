#pragma once

#include <cmath>
#include <vector>

#include "avmac/rational.hpp"
#include "avmac/util.hpp"

namespace avmac {

template <class T>
struct LpTraits;

template <>
struct LpTraits<double> {
  static bool is_zero(double v) { return std::fabs(v) <= 1e-11; }
  static bool is_neg(double v) { return v < -1e-11; }
  static bool is_pos(double v) { return v > 1e-11; }
  static void clean(double& v) {
    if (std::fabs(v) < 1e-13) v = 0.0;
  }
};

template <>
struct LpTraits<Rat> {
  static bool is_zero(const Rat& v) { return v == 0; }
  static bool is_neg(const Rat& v) { return v < 0; }
  static bool is_pos(const Rat& v) { return v > 0; }
  static void clean(Rat&) {}
};

// Dense two-phase tableau simplex for
//     min c·x   s.t.   A x = b,  x >= 0.
// Bland's rule throughout: these problems are heavily degenerate.
template <class T>
class DenseSimplex {
 public:
  struct Outcome {
    bool feasible = false;  // Ax = b, x >= 0 has a solution
    std::vector<T> x;
    T objective{};
    long iterations = 0;
  };

  DenseSimplex(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T> c, long max_iter = 200000)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), max_iter_(max_iter) {}

  Outcome run() {
    const std::size_t m = a_.size();
    const std::size_t n = m ? a_[0].size() : c_.size();
    for (std::size_t i = 0; i < m; ++i)
      if (LpTraits<T>::is_neg(b_[i])) {
        for (auto& v : a_[i]) v = -v;
        b_[i] = -b_[i];
      }

    // tableau [A | I | b], artificial basis
    tab_.assign(m, std::vector<T>(n + m + 1, T{}));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) tab_[i][j] = a_[i][j];
      tab_[i][n + i] = T{1};
      tab_[i][n + m] = b_[i];
    }
    basis_.resize(m);
    for (std::size_t i = 0; i < m; ++i) basis_[i] = int(n + i);
    n_ = n;
    m_ = m;

    Outcome out;

    // phase 1: minimize the artificial sum
    std::vector<T> phase1_cost(n + m, T{});
    for (std::size_t j = n; j < n + m; ++j) phase1_cost[j] = T{1};
    T w = iterate(phase1_cost, /*allow_artificial=*/true, out.iterations);
    if (!LpTraits<T>::is_zero(w)) {
      out.feasible = false;
      out.objective = w;
      return out;
    }
    out.feasible = true;

    // pivot leftover artificials out; an all-zero row is redundant
    for (std::size_t i = 0; i < m; ++i) {
      if (basis_[i] < int(n)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!LpTraits<T>::is_zero(tab_[i][j])) {
          pivot(i, j);
          break;
        }
    }

    // phase 2
    std::vector<T> cost(n + m, T{});
    for (std::size_t j = 0; j < n; ++j) cost[j] = c_[j];
    out.objective = iterate(cost, /*allow_artificial=*/false, out.iterations);
    out.x.assign(n, T{});
    for (std::size_t i = 0; i < m; ++i)
      if (basis_[i] < int(n)) out.x[std::size_t(basis_[i])] = tab_[i][n + m];
    return out;
  }

 private:
  // run Bland-rule simplex for the given cost vector; returns objective value
  T iterate(const std::vector<T>& cost, bool allow_artificial, long& iterations) {
    const std::size_t ncols = n_ + m_;
    for (;;) {
      if (++iterations > max_iter_) throw Error(Errc::solver_failure, "simplex iteration budget exceeded");
      // reduced costs from scratch: small tableaus, and it sidesteps drift
      int enter = -1;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (!allow_artificial && j >= n_) break;
        if (is_basic(j)) continue;
        T red = cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
          const T& cb = cost[std::size_t(basis_[i])];
          if (!LpTraits<T>::is_zero(cb)) red -= cb * tab_[i][j];
        }
        if (LpTraits<T>::is_neg(red)) {
          enter = int(j);
          break;  // Bland: first improving column
        }
      }
      if (enter < 0) break;

      int leave = -1;
      T best_ratio{};
      for (std::size_t i = 0; i < m_; ++i) {
        if (!LpTraits<T>::is_pos(tab_[i][std::size_t(enter)])) continue;
        T ratio = tab_[i][ncols] / tab_[i][std::size_t(enter)];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[std::size_t(leave)])) {
          leave = int(i);
          best_ratio = ratio;
        }
      }
      if (leave < 0) throw Error(Errc::solver_failure, "unbounded direction in feasibility program");
      pivot(std::size_t(leave), std::size_t(enter));
    }
    T obj{};
    for (std::size_t i = 0; i < m_; ++i) {
      const T& cb = cost[std::size_t(basis_[i])];
      if (!LpTraits<T>::is_zero(cb)) obj += cb * tab_[i][ncols];
    }
    return obj;
  }

  bool is_basic(std::size_t col) const {
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] == int(col)) return true;
    return false;
  }

  void pivot(std::size_t row, std::size_t col) {
    const std::size_t w = n_ + m_ + 1;
    T inv = tab_[row][col];
    for (std::size_t j = 0; j < w; ++j) {
      tab_[row][j] = tab_[row][j] / inv;
      LpTraits<T>::clean(tab_[row][j]);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      T f = tab_[i][col];
      if (LpTraits<T>::is_zero(f) && f == T{}) continue;
      for (std::size_t j = 0; j < w; ++j) {
        tab_[i][j] -= f * tab_[row][j];
        LpTraits<T>::clean(tab_[i][j]);
      }
    }
    basis_[row] = int(col);
  }

  std::vector<std::vector<T>> a_;
  std::vector<T> b_, c_;
  long max_iter_;
  std::vector<std::vector<T>> tab_;
  std::vector<int> basis_;
  std::size_t n_ = 0, m_ = 0;
};

}  // namespace avmac
