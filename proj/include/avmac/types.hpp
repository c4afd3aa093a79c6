#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "avmac/util.hpp"

namespace avmac {

struct Axis {
  std::string name;
  int size = 0;
};

inline bool same_shape(const std::vector<Axis>& a, const std::vector<Axis>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size != b[i].size) return false;
  return true;
}

// Dense joint distribution over a product of named finite alphabets.
// When built from sequences (an empirical type), `denominator` records n and
// every entry is an integer multiple of 1/n.
struct JointDist {
  std::vector<Axis> axes;
  std::vector<double> table;  // row-major, last axis fastest
  int denominator = 0;

  static JointDist validated(std::vector<Axis> axes, std::vector<double> table, double tol = 1e-12) {
    std::size_t cells = 1;
    for (const auto& a : axes) {
      if (a.size < 1) throw Error(Errc::shape_mismatch, "axis '" + a.name + "' has size < 1");
      cells *= std::size_t(a.size);
    }
    if (table.size() != cells)
      throw Error(Errc::shape_mismatch,
                  "table has " + std::to_string(table.size()) + " cells, expected " + std::to_string(cells));
    double total = 0.0;
    for (double v : table) {
      if (v < 0.0) throw Error(Errc::negative_entry, "joint table has a negative cell");
      total += v;
    }
    if (std::fabs(total - 1.0) > tol)
      throw Error(Errc::row_sum_mismatch, "joint table sums to " + fmt_g9(total));
    JointDist j;
    j.axes = std::move(axes);
    j.table = std::move(table);
    return j;
  }

  int rank() const { return int(axes.size()); }

  std::size_t cells() const { return table.size(); }

  // marginal over the listed axes, in the listed order
  JointDist marginal(const std::vector<int>& keep) const {
    for (int k : keep)
      if (k < 0 || k >= rank()) throw Error(Errc::shape_mismatch, "marginal axis out of range");
    JointDist out;
    std::size_t out_cells = 1;
    for (int k : keep) {
      out.axes.push_back(axes[std::size_t(k)]);
      out_cells *= std::size_t(axes[std::size_t(k)].size);
    }
    out.denominator = denominator;
    out.table.assign(out_cells, 0.0);

    std::vector<int> idx(axes.size(), 0);
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      std::size_t oflat = 0;
      for (int k : keep) oflat = oflat * std::size_t(axes[std::size_t(k)].size) + std::size_t(idx[std::size_t(k)]);
      out.table[oflat] += table[flat];
      for (int a = rank() - 1; a >= 0; --a) {
        if (++idx[std::size_t(a)] < axes[std::size_t(a)].size) break;
        idx[std::size_t(a)] = 0;
      }
    }
    return out;
  }
};

// One aligned symbol sequence together with its alphabet.
struct Seq {
  Axis axis;
  std::vector<int> symbols;
};

inline JointDist joint_type(const std::vector<Seq>& seqs) {
  if (seqs.empty()) throw Error(Errc::length_mismatch, "joint_type of zero sequences");
  std::size_t n = seqs[0].symbols.size();
  if (n == 0) throw Error(Errc::length_mismatch, "joint_type of empty sequences");
  for (const auto& s : seqs)
    if (s.symbols.size() != n) throw Error(Errc::length_mismatch, "sequence lengths differ");

  JointDist j;
  std::size_t cells = 1;
  for (const auto& s : seqs) {
    j.axes.push_back(s.axis);
    cells *= std::size_t(s.axis.size);
  }
  j.denominator = int(n);
  j.table.assign(cells, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t flat = 0;
    for (const auto& s : seqs) {
      int v = s.symbols[t];
      if (v < 0 || v >= s.axis.size)
        throw Error(Errc::symbol_out_of_range,
                    "symbol " + std::to_string(v) + " outside alphabet '" + s.axis.name + "'");
      flat = flat * std::size_t(s.axis.size) + std::size_t(v);
    }
    j.table[flat] += 1.0 / double(n);
  }
  return j;
}

// D(P || Q) in bits; +infinity when P charges a Q-null cell. 0 log 0 = 0.
inline double divergence(const JointDist& p, const JointDist& q) {
  if (!same_shape(p.axes, q.axes)) throw Error(Errc::shape_mismatch, "divergence of differently shaped tables");
  double d = 0.0;
  for (std::size_t i = 0; i < p.table.size(); ++i) {
    if (p.table[i] == 0.0) continue;
    if (q.table[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p.table[i] * std::log2(p.table[i] / q.table[i]);
  }
  return d < 0.0 ? 0.0 : d;  // guard tiny negative round-off when P == Q
}

inline double variational_distance(const JointDist& p, const JointDist& q) {
  if (!same_shape(p.axes, q.axes)) throw Error(Errc::shape_mismatch, "distance of differently shaped tables");
  double d = 0.0;
  for (std::size_t i = 0; i < p.table.size(); ++i) d += std::fabs(p.table[i] - q.table[i]);
  return d;
}

inline double entropy(const JointDist& p) {
  double h = 0.0;
  for (double v : p.table)
    if (v > 0.0) h -= v * std::log2(v);
  return h < 0.0 ? 0.0 : h;
}

namespace detail {

inline std::vector<int> concat_groups(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline void check_disjoint(const JointDist& j, const std::vector<int>& left, const std::vector<int>& right,
                           const std::vector<int>& given) {
  std::vector<int> seen(std::size_t(j.rank()), 0);
  auto mark = [&](const std::vector<int>& g, const char* name) {
    for (int a : g) {
      if (a < 0 || a >= j.rank()) throw Error(Errc::shape_mismatch, std::string(name) + " axis out of range");
      if (seen[std::size_t(a)]++) throw Error(Errc::shape_mismatch, "axis groups overlap");
    }
  };
  mark(left, "left");
  mark(right, "right");
  mark(given, "given");
}

}  // namespace detail

// I(left ∧ right | given) in bits. Axes outside the three groups are
// marginalized out. Conditional entropies follow H(A|B) = H(AB) - H(B).
inline double mutual_information(const JointDist& j, const std::vector<int>& left, const std::vector<int>& right,
                                 const std::vector<int>& given = {}) {
  detail::check_disjoint(j, left, right, given);
  double h_lg = entropy(j.marginal(detail::concat_groups(left, given)));
  double h_rg = entropy(j.marginal(detail::concat_groups(right, given)));
  double h_g = entropy(j.marginal(given));
  double h_all = entropy(j.marginal(detail::concat_groups(detail::concat_groups(left, right), given)));
  double mi = h_lg + h_rg - h_g - h_all;
  return mi < 0.0 ? 0.0 : mi;
}

}  // namespace avmac
