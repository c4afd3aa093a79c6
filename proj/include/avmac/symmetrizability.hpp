#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "avmac/channel.hpp"
#include "avmac/simplex.hpp"
#include "avmac/types.hpp"

namespace avmac::sym {

// Conditional state distribution certifying the joint-permutation condition.
// Rows are indexed by ordered tail tuples of (x,y) pair indices p = x*|Y|+y,
// row-major over the u tail positions; solver output is tail-symmetric.
struct SymmetrizerDiag {
  int u = 0;
  int x_size = 0, y_size = 0, s_size = 0;
  std::vector<double> table;  // [pair-tuple row][s]
  std::vector<Rat> table_exact;

  int pair_count() const { return x_size * y_size; }
  std::size_t rows() const {
    std::size_t r = 1;
    for (int i = 0; i < u; ++i) r *= std::size_t(pair_count());
    return r;
  }
  std::size_t row_of(const std::vector<int>& pair_tuple) const {
    std::size_t r = 0;
    for (int p : pair_tuple) r = r * std::size_t(pair_count()) + std::size_t(p);
    return r;
  }
  double value(std::size_t row, int s) const { return table[row * std::size_t(s_size) + std::size_t(s)]; }
};

// Certificate for the separate-permutation condition with a x-tail symbols
// and b y-tail symbols.
struct SymmetrizerRect {
  int a = 0, b = 0;
  int x_size = 0, y_size = 0, s_size = 0;
  std::vector<double> table;  // [x-tuple × y-tuple row][s]
  std::vector<Rat> table_exact;

  std::size_t x_rows() const {
    std::size_t r = 1;
    for (int i = 0; i < a; ++i) r *= std::size_t(x_size);
    return r;
  }
  std::size_t y_rows() const {
    std::size_t r = 1;
    for (int i = 0; i < b; ++i) r *= std::size_t(y_size);
    return r;
  }
  std::size_t rows() const { return x_rows() * y_rows(); }
  std::size_t row_of(const std::vector<int>& xs, const std::vector<int>& ys) const {
    std::size_t rx = 0, ry = 0;
    for (int v : xs) rx = rx * std::size_t(x_size) + std::size_t(v);
    for (int v : ys) ry = ry * std::size_t(y_size) + std::size_t(v);
    return rx * y_rows() + ry;
  }
  double value(std::size_t row, int s) const { return table[row * std::size_t(s_size) + std::size_t(s)]; }
};

using SymCert = std::variant<SymmetrizerDiag, SymmetrizerRect>;

struct CheckOptions {
  enum class Exact { automatic, on, off };
  Exact exact = Exact::automatic;
  std::size_t var_cap = 200000;      // cap on full-table variables |X·Y|^u · |S|
  std::size_t tableau_cap = 20000000;  // rows × cols of the LP tableau
  long max_iter = 200000;

  bool use_exact(const Avmac& ch) const {
    if (exact == Exact::on) {
      if (!ch.exact()) throw Error(Errc::bad_argument, "exact mode requires an all-rational channel");
      return true;
    }
    return exact == Exact::automatic && ch.exact();
  }
};

struct Feasibility {
  bool feasible = false;
  bool exact = false;
  double t_star = std::numeric_limits<double>::quiet_NaN();  // min over tables of max residual
  double residual = std::numeric_limits<double>::quiet_NaN();  // re-verified, full permutation set
  std::optional<SymCert> cert;
};

namespace detail {

inline std::size_t checked_pow(std::size_t base, int exp, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// nondecreasing k-tuples over {0,...,m-1}
inline std::vector<std::vector<int>> multisets(int m, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(std::size_t(std::max(k, 0)), 0);
  std::function<void(int, int)> rec = [&](int pos, int lo) {
    if (pos == k) {
      out.push_back(cur);
      return;
    }
    for (int v = lo; v < m; ++v) {
      cur[std::size_t(pos)] = v;
      rec(pos + 1, v);
    }
  };
  rec(0, 0);
  return out;
}

inline std::vector<int> sorted_tuple(std::vector<int> t) {
  std::sort(t.begin(), t.end());
  return t;
}

template <class T>
T kernel_value(const Avmac& ch, int x, int y, int s, int z);
template <>
inline double kernel_value<double>(const Avmac& ch, int x, int y, int s, int z) {
  return ch(x, y, s, z);
}
template <>
inline Rat kernel_value<Rat>(const Avmac& ch, int x, int y, int s, int z) {
  return ch.exact_at(x, y, s, z);
}

// sparse equality rows over the certificate variables
template <class T>
using EqRow = std::vector<std::pair<int, T>>;

// Solve  min t  s.t.  |eq·U| <= t for each equality, rows of U are
// distributions. Variables: [U (n_uvars)] [t] [2 slacks per equality].
template <class T>
struct MinMaxOutcome {
  T t_star{};
  std::vector<T> uvars;
};

template <class T>
MinMaxOutcome<T> solve_min_max_residual(int n_uvars, int s_size, const std::vector<EqRow<T>>& eqs,
                                        const CheckOptions& opts) {
  const int n_rows_u = n_uvars / s_size;
  const std::size_t ne = eqs.size();
  const std::size_t ncols = std::size_t(n_uvars) + 1 + 2 * ne;
  const std::size_t nrows = 2 * ne + std::size_t(n_rows_u);
  if (nrows * ncols > opts.tableau_cap)
    throw Error(Errc::problem_too_large,
                "LP tableau " + std::to_string(nrows) + "x" + std::to_string(ncols) + " exceeds cap");

  std::vector<std::vector<T>> a(nrows, std::vector<T>(ncols, T{}));
  std::vector<T> b(nrows, T{});
  std::vector<T> c(ncols, T{});
  const int t_col = n_uvars;
  c[std::size_t(t_col)] = T{1};

  for (std::size_t e = 0; e < ne; ++e) {
    auto& pos = a[2 * e];
    auto& neg = a[2 * e + 1];
    for (const auto& [j, v] : eqs[e]) {
      pos[std::size_t(j)] += v;
      neg[std::size_t(j)] -= v;
    }
    pos[std::size_t(t_col)] = T{-1};
    neg[std::size_t(t_col)] = T{-1};
    pos[std::size_t(n_uvars) + 1 + 2 * e] = T{1};
    neg[std::size_t(n_uvars) + 1 + 2 * e + 1] = T{1};
  }
  for (int r = 0; r < n_rows_u; ++r) {
    auto& row = a[2 * ne + std::size_t(r)];
    for (int s = 0; s < s_size; ++s) row[std::size_t(r * s_size + s)] = T{1};
    b[2 * ne + std::size_t(r)] = T{1};
  }

  DenseSimplex<T> lp(std::move(a), std::move(b), std::move(c), opts.max_iter);
  auto out = lp.run();
  if (!out.feasible) throw Error(Errc::solver_failure, "phase-1 failed on a feasible program");
  MinMaxOutcome<T> res;
  res.t_star = out.objective;
  res.uvars.assign(out.x.begin(), out.x.begin() + n_uvars);
  return res;
}

inline void clean_rows(std::vector<double>& table, int s_size) {
  for (std::size_t r = 0; r * std::size_t(s_size) < table.size(); ++r) {
    double sum = 0.0;
    for (int s = 0; s < s_size; ++s) {
      double& v = table[r * std::size_t(s_size) + std::size_t(s)];
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (sum > 0.0)
      for (int s = 0; s < s_size; ++s) table[r * std::size_t(s_size) + std::size_t(s)] /= sum;
  }
}

}  // namespace detail

// --------------------------------------------------------------------------
// Verification: evaluates the defining equalities over the complete
// permutation sets, independent of any solver or storage reduction.
// Stops early once the residual exceeds `bail_above`.

inline double verify_certificate(const Avmac& ch, const SymmetrizerDiag& cert,
                                 double bail_above = std::numeric_limits<double>::infinity()) {
  if (cert.x_size != ch.x_size || cert.y_size != ch.y_size || cert.s_size != ch.s_size)
    throw Error(Errc::dimension_mismatch, "certificate dimensions do not match the channel");
  const int P = cert.pair_count();
  const int k = cert.u + 1;
  std::vector<int> tuple(std::size_t(k), 0);
  std::vector<int> perm(std::size_t(k), 0);
  std::vector<int> tail(std::size_t(cert.u), 0);
  double worst = 0.0;

  auto lhs_rhs = [&](const std::vector<int>& arrangement) {
    // arrangement[0] is the lead pair, the rest index the table row
    for (int i = 1; i < k; ++i) tail[std::size_t(i - 1)] = tuple[std::size_t(arrangement[std::size_t(i)])];
    std::size_t row = cert.row_of(tail);
    int lead = tuple[std::size_t(arrangement[0])];
    int x = lead / ch.y_size, y = lead % ch.y_size;
    std::vector<double> out(std::size_t(ch.z_size), 0.0);
    for (int s = 0; s < ch.s_size; ++s) {
      double us = cert.value(row, s);
      if (us == 0.0) continue;
      for (int z = 0; z < ch.z_size; ++z) out[std::size_t(z)] += us * ch(x, y, s, z);
    }
    return out;
  };

  std::function<bool(int)> scan = [&](int pos) -> bool {
    if (pos == k) {
      for (int i = 0; i < k; ++i) perm[std::size_t(i)] = i;
      auto base = lhs_rhs(perm);
      while (std::next_permutation(perm.begin(), perm.end())) {
        auto other = lhs_rhs(perm);
        for (int z = 0; z < ch.z_size; ++z) {
          double r = std::fabs(base[std::size_t(z)] - other[std::size_t(z)]);
          if (r > worst) worst = r;
        }
        if (worst > bail_above) return true;
      }
      return false;
    }
    for (int p = 0; p < P; ++p) {
      tuple[std::size_t(pos)] = p;
      if (scan(pos + 1)) return true;
    }
    return false;
  };
  scan(0);
  return worst;
}

inline double verify_certificate(const Avmac& ch, const SymmetrizerRect& cert,
                                 double bail_above = std::numeric_limits<double>::infinity()) {
  if (cert.x_size != ch.x_size || cert.y_size != ch.y_size || cert.s_size != ch.s_size)
    throw Error(Errc::dimension_mismatch, "certificate dimensions do not match the channel");
  const int ka = cert.a + 1, kb = cert.b + 1;
  std::vector<int> xs(std::size_t(ka), 0), ys(std::size_t(kb), 0);
  std::vector<int> pa(std::size_t(ka), 0), pb(std::size_t(kb), 0);
  std::vector<int> xtail(std::size_t(cert.a), 0), ytail(std::size_t(cert.b), 0);
  double worst = 0.0;

  auto eval = [&](const std::vector<int>& permx, const std::vector<int>& permy) {
    for (int i = 1; i < ka; ++i) xtail[std::size_t(i - 1)] = xs[std::size_t(permx[std::size_t(i)])];
    for (int i = 1; i < kb; ++i) ytail[std::size_t(i - 1)] = ys[std::size_t(permy[std::size_t(i)])];
    std::size_t row = cert.row_of(xtail, ytail);
    int x = xs[std::size_t(permx[0])], y = ys[std::size_t(permy[0])];
    std::vector<double> out(std::size_t(ch.z_size), 0.0);
    for (int s = 0; s < ch.s_size; ++s) {
      double us = cert.value(row, s);
      if (us == 0.0) continue;
      for (int z = 0; z < ch.z_size; ++z) out[std::size_t(z)] += us * ch(x, y, s, z);
    }
    return out;
  };

  bool bail = false;
  std::function<void(int)> scan_y = [&](int pos) {
    if (bail) return;
    if (pos == kb) {
      for (int i = 0; i < ka; ++i) pa[std::size_t(i)] = i;
      for (int i = 0; i < kb; ++i) pb[std::size_t(i)] = i;
      auto base = eval(pa, pb);
      // all (π, σ) arrangements, identity included (residual 0, harmless)
      std::vector<int> qa = pa;
      do {
        std::vector<int> qb = pb;
        do {
          auto other = eval(qa, qb);
          for (int z = 0; z < ch.z_size; ++z) {
            double r = std::fabs(base[std::size_t(z)] - other[std::size_t(z)]);
            if (r > worst) worst = r;
          }
          if (worst > bail_above) {
            bail = true;
            return;
          }
        } while (std::next_permutation(qb.begin(), qb.end()));
      } while (std::next_permutation(qa.begin(), qa.end()));
      return;
    }
    for (int v = 0; v < ch.y_size; ++v) {
      ys[std::size_t(pos)] = v;
      scan_y(pos + 1);
      if (bail) return;
    }
  };
  std::function<void(int)> scan_x = [&](int pos) {
    if (bail) return;
    if (pos == ka) {
      scan_y(0);
      return;
    }
    for (int v = 0; v < ch.x_size; ++v) {
      xs[std::size_t(pos)] = v;
      scan_x(pos + 1);
      if (bail) return;
    }
  };
  scan_x(0);
  return worst;
}

inline double verify_certificate(const Avmac& ch, const SymCert& cert,
                                 double bail_above = std::numeric_limits<double>::infinity()) {
  return std::visit([&](const auto& c) { return verify_certificate(ch, c, bail_above); }, cert);
}

// --------------------------------------------------------------------------
// Feasibility checks. The LP minimizes the maximum equality residual over
// tail-symmetric tables; tail symmetry plus the pairwise swap family is
// equivalent to the full permutation condition, and verify_certificate
// audits the reduction on every feasible outcome.

namespace detail {

template <class T>
Feasibility run_diag(const Avmac& ch, int u, double tol, const CheckOptions& opts) {
  const int P = ch.x_size * ch.y_size;
  const int S = ch.s_size;
  auto rows = multisets(P, u);
  auto tails = multisets(P, u - 1);
  std::map<std::vector<int>, int> row_id;
  for (std::size_t i = 0; i < rows.size(); ++i) row_id[rows[i]] = int(i);
  const int n_uvars = int(rows.size()) * S;

  std::vector<EqRow<T>> eqs;
  std::vector<int> key;
  for (int p1 = 0; p1 < P; ++p1)
    for (int p2 = p1 + 1; p2 < P; ++p2)
      for (const auto& t : tails) {
        key = t;
        key.push_back(p2);
        std::sort(key.begin(), key.end());
        int row_lhs = row_id.at(key);
        key = t;
        key.push_back(p1);
        std::sort(key.begin(), key.end());
        int row_rhs = row_id.at(key);
        int x1 = p1 / ch.y_size, y1 = p1 % ch.y_size;
        int x2 = p2 / ch.y_size, y2 = p2 % ch.y_size;
        for (int z = 0; z < ch.z_size; ++z) {
          EqRow<T> eq;
          for (int s = 0; s < S; ++s) {
            T w1 = kernel_value<T>(ch, x1, y1, s, z);
            T w2 = kernel_value<T>(ch, x2, y2, s, z);
            if (!(w1 == T{})) eq.emplace_back(row_lhs * S + s, w1);
            if (!(w2 == T{})) eq.emplace_back(row_rhs * S + s, -w2);
          }
          if (!eq.empty()) eqs.push_back(std::move(eq));
        }
      }

  auto sol = solve_min_max_residual<T>(n_uvars, S, eqs, opts);

  SymmetrizerDiag cert;
  cert.u = u;
  cert.x_size = ch.x_size;
  cert.y_size = ch.y_size;
  cert.s_size = ch.s_size;
  cert.table.assign(cert.rows() * std::size_t(S), 0.0);
  if constexpr (std::is_same_v<T, Rat>) cert.table_exact.assign(cert.table.size(), Rat(0));

  std::vector<int> tuple(std::size_t(u), 0);
  std::size_t n_tuples = cert.rows();
  for (std::size_t flat = 0; flat < n_tuples; ++flat) {
    std::size_t rest = flat;
    for (int i = u - 1; i >= 0; --i) {
      tuple[std::size_t(i)] = int(rest % std::size_t(P));
      rest /= std::size_t(P);
    }
    int src = row_id.at(sorted_tuple(tuple));
    for (int s = 0; s < S; ++s) {
      const T& v = sol.uvars[std::size_t(src * S + s)];
      if constexpr (std::is_same_v<T, Rat>) {
        cert.table_exact[flat * std::size_t(S) + std::size_t(s)] = v;
        cert.table[flat * std::size_t(S) + std::size_t(s)] = to_double(v);
      } else {
        cert.table[flat * std::size_t(S) + std::size_t(s)] = v;
      }
    }
  }

  Feasibility out;
  out.exact = std::is_same_v<T, Rat>;
  if constexpr (std::is_same_v<T, Rat>) {
    out.t_star = to_double(sol.t_star);
    out.feasible = (sol.t_star == 0);
  } else {
    detail::clean_rows(cert.table, S);
    out.t_star = sol.t_star;
    out.feasible = (sol.t_star <= tol);
  }
  if (out.feasible) {
    out.residual = verify_certificate(ch, cert);
    if (!out.exact && out.residual > tol) out.feasible = false;  // audit failed
    if (out.feasible) out.cert = SymCert(std::move(cert));
  }
  return out;
}

template <class T>
Feasibility run_rect(const Avmac& ch, int a, int b, double tol, const CheckOptions& opts) {
  const int S = ch.s_size;
  auto xrows = multisets(ch.x_size, a);
  auto yrows = multisets(ch.y_size, b);
  std::map<std::vector<int>, int> xid, yid;
  for (std::size_t i = 0; i < xrows.size(); ++i) xid[xrows[i]] = int(i);
  for (std::size_t i = 0; i < yrows.size(); ++i) yid[yrows[i]] = int(i);
  const int ny = int(yrows.size());
  const int n_urows = int(xrows.size()) * ny;
  const int n_uvars = n_urows * S;

  auto mx_all = multisets(ch.x_size, a + 1);
  auto my_all = multisets(ch.y_size, b + 1);

  auto remove_one = [](const std::vector<int>& ms, int v) {
    std::vector<int> out;
    out.reserve(ms.size() - 1);
    bool removed = false;
    for (int e : ms) {
      if (!removed && e == v) {
        removed = true;
        continue;
      }
      out.push_back(e);
    }
    return out;
  };

  std::vector<EqRow<T>> eqs;
  for (const auto& mx : mx_all)
    for (const auto& my : my_all) {
      std::vector<int> xsupp = mx, ysupp = my;
      xsupp.erase(std::unique(xsupp.begin(), xsupp.end()), xsupp.end());
      ysupp.erase(std::unique(ysupp.begin(), ysupp.end()), ysupp.end());
      // all unordered pairs of distinct lead choices (x,y) != (x',y')
      std::vector<std::pair<int, int>> leads;
      for (int x : xsupp)
        for (int y : ysupp) leads.emplace_back(x, y);
      for (std::size_t i = 0; i < leads.size(); ++i)
        for (std::size_t j = i + 1; j < leads.size(); ++j) {
          auto [x1, y1] = leads[i];
          auto [x2, y2] = leads[j];
          int row1 = xid.at(remove_one(mx, x1)) * ny + yid.at(remove_one(my, y1));
          int row2 = xid.at(remove_one(mx, x2)) * ny + yid.at(remove_one(my, y2));
          for (int z = 0; z < ch.z_size; ++z) {
            EqRow<T> eq;
            for (int s = 0; s < S; ++s) {
              T w1 = kernel_value<T>(ch, x1, y1, s, z);
              T w2 = kernel_value<T>(ch, x2, y2, s, z);
              if (!(w1 == T{})) eq.emplace_back(row1 * S + s, w1);
              if (!(w2 == T{})) eq.emplace_back(row2 * S + s, -w2);
            }
            if (!eq.empty()) eqs.push_back(std::move(eq));
          }
        }
    }

  auto sol = solve_min_max_residual<T>(n_uvars, S, eqs, opts);

  SymmetrizerRect cert;
  cert.a = a;
  cert.b = b;
  cert.x_size = ch.x_size;
  cert.y_size = ch.y_size;
  cert.s_size = ch.s_size;
  cert.table.assign(cert.rows() * std::size_t(S), 0.0);
  if constexpr (std::is_same_v<T, Rat>) cert.table_exact.assign(cert.table.size(), Rat(0));

  std::vector<int> xt(std::size_t(a), 0), yt(std::size_t(b), 0);
  for (std::size_t rx = 0; rx < cert.x_rows(); ++rx) {
    std::size_t rest = rx;
    for (int i = a - 1; i >= 0; --i) {
      xt[std::size_t(i)] = int(rest % std::size_t(ch.x_size));
      rest /= std::size_t(ch.x_size);
    }
    int sx = xid.at(sorted_tuple(xt));
    for (std::size_t ry = 0; ry < cert.y_rows(); ++ry) {
      std::size_t rest2 = ry;
      for (int i = b - 1; i >= 0; --i) {
        yt[std::size_t(i)] = int(rest2 % std::size_t(ch.y_size));
        rest2 /= std::size_t(ch.y_size);
      }
      int sy = yid.at(sorted_tuple(yt));
      std::size_t dst = (rx * cert.y_rows() + ry) * std::size_t(S);
      int src = (sx * ny + sy) * S;
      for (int s = 0; s < S; ++s) {
        const T& v = sol.uvars[std::size_t(src + s)];
        if constexpr (std::is_same_v<T, Rat>) {
          cert.table_exact[dst + std::size_t(s)] = v;
          cert.table[dst + std::size_t(s)] = to_double(v);
        } else {
          cert.table[dst + std::size_t(s)] = v;
        }
      }
    }
  }

  Feasibility out;
  out.exact = std::is_same_v<T, Rat>;
  if constexpr (std::is_same_v<T, Rat>) {
    out.t_star = to_double(sol.t_star);
    out.feasible = (sol.t_star == 0);
  } else {
    detail::clean_rows(cert.table, S);
    out.t_star = sol.t_star;
    out.feasible = (sol.t_star <= tol);
  }
  if (out.feasible) {
    out.residual = verify_certificate(ch, cert);
    if (!out.exact && out.residual > tol) out.feasible = false;
    if (out.feasible) out.cert = SymCert(std::move(cert));
  }
  return out;
}

}  // namespace detail

inline Feasibility check_diag_symmetrizable(const Avmac& ch, int u, double tol,
                                            const CheckOptions& opts = {}) {
  if (u < 1) throw Error(Errc::bad_argument, "diagonal condition needs u >= 1");
  std::size_t P = std::size_t(ch.x_size) * std::size_t(ch.y_size);
  if (detail::checked_pow(P, u, opts.var_cap) * std::size_t(ch.s_size) > opts.var_cap)
    throw Error(Errc::problem_too_large, "|X.Y|^u * |S| exceeds the variable cap");
  return opts.use_exact(ch) ? detail::run_diag<Rat>(ch, u, tol, opts) : detail::run_diag<double>(ch, u, tol, opts);
}

inline Feasibility check_rect_symmetrizable(const Avmac& ch, int a, int b, double tol,
                                            const CheckOptions& opts = {}) {
  if (a < 0 || b < 0 || a + b < 1) throw Error(Errc::bad_argument, "rectangle condition needs a,b >= 0, a+b >= 1");
  std::size_t nrows = detail::checked_pow(std::size_t(ch.x_size), a, opts.var_cap);
  std::size_t nrows_y = detail::checked_pow(std::size_t(ch.y_size), b, opts.var_cap);
  if (nrows > opts.var_cap / std::max<std::size_t>(1, nrows_y) ||
      nrows * nrows_y * std::size_t(ch.s_size) > opts.var_cap)
    throw Error(Errc::problem_too_large, "|X|^a * |Y|^b * |S| exceeds the variable cap");
  return opts.use_exact(ch) ? detail::run_rect<Rat>(ch, a, b, tol, opts) : detail::run_rect<double>(ch, a, b, tol, opts);
}

// minimal (a,b) pairs under the product order with (a+1)(b+1) >= u+1
inline std::vector<std::pair<int, int>> minimal_rect_pairs(int u) {
  std::vector<std::pair<int, int>> cand;
  for (int a = 0; a <= u; ++a) {
    int b = (u + 1 + a) / (a + 1) - 1;  // ceil((u+1)/(a+1)) - 1
    cand.emplace_back(a, b);
  }
  std::vector<std::pair<int, int>> out;
  for (auto& p : cand) {
    bool dominated = false;
    for (auto& q : cand)
      if (q != p && q.first <= p.first && q.second <= p.second) dominated = true;
    if (!dominated && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct SubCheck {
  std::string mode;  // "diag" or "rect"
  int u = 0;
  int a = -1, b = -1;
  bool attempted = false;
  bool feasible = false;
  double t_star = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // nonempty when the sub-check itself failed
};

struct SymEntry {
  int u = 0;
  bool symmetrizable_raw = false;  // what the sub-checks said at this u
  bool symmetrizable = false;      // after downward-monotone closure
  std::vector<SubCheck> checks;
};

struct SymReport {
  int u_max = 0;
  double tol = 0.0;
  bool exact_mode = false;
  int index = 0;                     // U(G) restricted to u <= u_max
  bool index_is_lower_bound = false;  // still symmetrizable at u_max
  bool monotonicity_repaired = false;  // raw verdicts violated monotonicity
  std::vector<SymEntry> entries;
  std::map<int, SymCert> certificates;  // per u, first feasible certificate
};

inline SymReport symmetrizability_index(const Avmac& ch, int u_max, double tol,
                                        const CheckOptions& opts = {}) {
  if (u_max < 1) throw Error(Errc::bad_argument, "u_max must be >= 1");
  SymReport rep;
  rep.u_max = u_max;
  rep.tol = tol;
  rep.exact_mode = opts.use_exact(ch);

  for (int u = 1; u <= u_max; ++u) {
    SymEntry entry;
    entry.u = u;

    SubCheck diag;
    diag.mode = "diag";
    diag.u = u;
    diag.attempted = true;
    try {
      auto r = check_diag_symmetrizable(ch, u, tol, opts);
      diag.feasible = r.feasible;
      diag.t_star = r.t_star;
      diag.residual = r.residual;
      if (r.feasible && !rep.certificates.count(u)) rep.certificates.emplace(u, *r.cert);
    } catch (const Error& e) {
      diag.error = e.what();
    }
    entry.checks.push_back(diag);

    for (auto [a, b] : minimal_rect_pairs(u)) {
      SubCheck rc;
      rc.mode = "rect";
      rc.u = u;
      rc.a = a;
      rc.b = b;
      rc.attempted = true;
      try {
        auto r = check_rect_symmetrizable(ch, a, b, tol, opts);
        rc.feasible = r.feasible;
        rc.t_star = r.t_star;
        rc.residual = r.residual;
        if (r.feasible && !rep.certificates.count(u)) rep.certificates.emplace(u, *r.cert);
      } catch (const Error& e) {
        rc.error = e.what();
      }
      entry.checks.push_back(rc);
    }

    for (const auto& c : entry.checks) entry.symmetrizable_raw |= c.feasible;
    rep.entries.push_back(std::move(entry));
  }

  // downward closure: u-symmetrizable implies u'-symmetrizable for u' <= u
  bool carry = false;
  for (int i = int(rep.entries.size()) - 1; i >= 0; --i) {
    auto& e = rep.entries[std::size_t(i)];
    e.symmetrizable = e.symmetrizable_raw || carry;
    if (carry && !e.symmetrizable_raw) rep.monotonicity_repaired = true;
    carry = e.symmetrizable;
  }

  rep.index = 0;
  for (const auto& e : rep.entries)
    if (e.symmetrizable) rep.index = e.u;
  rep.index_is_lower_bound = !rep.entries.empty() && rep.entries.back().symmetrizable;
  return rep;
}

// --------------------------------------------------------------------------
// Pairwise mixture-distance evaluator used to probe the separation lemmas.

struct LemmaGapResult {
  double value = 0.0;
  bool alpha_warning = false;  // P or Q has a zero entry
};

// Diagonal flavor: k = tables.size() lead positions, each table a joint
// distribution over X^{k-1} x Y^{k-1} x S (axis order: x tails, y tails, s).
inline LemmaGapResult lemma_gap_eval_diag(const Avmac& ch, const Dist& p, const Dist& q,
                                          const std::vector<JointDist>& tables) {
  if (tables.size() < 2) throw Error(Errc::shape_mismatch, "need at least two tables");
  const int k = int(tables.size());
  const int tail = k - 1;
  for (const auto& t : tables) {
    if (t.rank() != 2 * tail + 1) throw Error(Errc::shape_mismatch, "table rank does not match table count");
    for (int i = 0; i < tail; ++i)
      if (t.axes[std::size_t(i)].size != ch.x_size || t.axes[std::size_t(tail + i)].size != ch.y_size)
        throw Error(Errc::shape_mismatch, "table axis sizes do not match the channel");
    if (t.axes.back().size != ch.s_size) throw Error(Errc::shape_mismatch, "table state axis mismatch");
  }
  if (p.size() != ch.x_size || q.size() != ch.y_size)
    throw Error(Errc::dimension_mismatch, "input distribution sizes do not match the channel");

  LemmaGapResult res;
  for (double v : p.p)
    if (v == 0.0) res.alpha_warning = true;
  for (double v : q.p)
    if (v == 0.0) res.alpha_warning = true;

  std::size_t cells = detail::checked_pow(std::size_t(ch.x_size), k, std::size_t(1) << 40) *
                      detail::checked_pow(std::size_t(ch.y_size), k, std::size_t(1) << 40) *
                      std::size_t(ch.z_size);
  if (cells > 20000000) throw Error(Errc::problem_too_large, "joint space too large for the gap evaluator");

  auto dist_for = [&](int i) {
    std::vector<double> out(cells, 0.0);
    std::vector<int> xs(std::size_t(k), 0), ys(std::size_t(k), 0);
    const JointDist& tab = tables[std::size_t(i)];
    std::size_t flat = 0;
    std::function<void(int)> rec_y = [&](int pos) {
      if (pos == k) {
        // table index: x tails then y tails (skipping position i), then s
        std::size_t base = 0;
        for (int j = 0; j < k; ++j)
          if (j != i) base = base * std::size_t(ch.x_size) + std::size_t(xs[std::size_t(j)]);
        for (int j = 0; j < k; ++j)
          if (j != i) base = base * std::size_t(ch.y_size) + std::size_t(ys[std::size_t(j)]);
        base *= std::size_t(ch.s_size);
        double pq = p[xs[std::size_t(i)]] * q[ys[std::size_t(i)]];
        for (int z = 0; z < ch.z_size; ++z) {
          double acc = 0.0;
          for (int s = 0; s < ch.s_size; ++s)
            acc += ch(xs[std::size_t(i)], ys[std::size_t(i)], s, z) * tab.table[base + std::size_t(s)];
          out[flat * std::size_t(ch.z_size) + std::size_t(z)] = pq * acc;
        }
        ++flat;
        return;
      }
      for (int v = 0; v < ch.y_size; ++v) {
        ys[std::size_t(pos)] = v;
        rec_y(pos + 1);
      }
    };
    std::function<void(int)> rec_x = [&](int pos) {
      if (pos == k) {
        rec_y(0);
        return;
      }
      for (int v = 0; v < ch.x_size; ++v) {
        xs[std::size_t(pos)] = v;
        rec_x(pos + 1);
      }
    };
    rec_x(0);
    return out;
  };

  std::vector<std::vector<double>> dists;
  dists.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) dists.push_back(dist_for(i));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < cells; ++c) d += std::fabs(dists[std::size_t(i)][c] - dists[std::size_t(j)][c]);
      res.value = std::max(res.value, d);
    }
  return res;
}

// Rectangle flavor: (a+1)(b+1) tables over X^a x Y^b x S, row-major in (i,j).
inline LemmaGapResult lemma_gap_eval_rect(const Avmac& ch, const Dist& p, const Dist& q,
                                          const std::vector<JointDist>& tables, int a, int b) {
  if (int(tables.size()) != (a + 1) * (b + 1))
    throw Error(Errc::shape_mismatch, "need (a+1)(b+1) tables");
  for (const auto& t : tables) {
    if (t.rank() != a + b + 1) throw Error(Errc::shape_mismatch, "table rank does not match (a,b)");
    for (int i = 0; i < a; ++i)
      if (t.axes[std::size_t(i)].size != ch.x_size) throw Error(Errc::shape_mismatch, "x-axis size mismatch");
    for (int i = 0; i < b; ++i)
      if (t.axes[std::size_t(a + i)].size != ch.y_size) throw Error(Errc::shape_mismatch, "y-axis size mismatch");
    if (t.axes.back().size != ch.s_size) throw Error(Errc::shape_mismatch, "state axis mismatch");
  }
  if (p.size() != ch.x_size || q.size() != ch.y_size)
    throw Error(Errc::dimension_mismatch, "input distribution sizes do not match the channel");

  LemmaGapResult res;
  for (double v : p.p)
    if (v == 0.0) res.alpha_warning = true;
  for (double v : q.p)
    if (v == 0.0) res.alpha_warning = true;

  const int ka = a + 1, kb = b + 1;
  std::size_t cells = detail::checked_pow(std::size_t(ch.x_size), ka, std::size_t(1) << 40) *
                      detail::checked_pow(std::size_t(ch.y_size), kb, std::size_t(1) << 40) *
                      std::size_t(ch.z_size);
  if (cells > 20000000) throw Error(Errc::problem_too_large, "joint space too large for the gap evaluator");

  auto dist_for = [&](int i, int j) {
    std::vector<double> out(cells, 0.0);
    std::vector<int> xs(std::size_t(ka), 0), ys(std::size_t(kb), 0);
    const JointDist& tab = tables[std::size_t(i * kb + j)];
    std::size_t flat = 0;
    std::function<void(int)> rec_y = [&](int pos) {
      if (pos == kb) {
        std::size_t base = 0;
        for (int t = 0; t < ka; ++t)
          if (t != i) base = base * std::size_t(ch.x_size) + std::size_t(xs[std::size_t(t)]);
        for (int t = 0; t < kb; ++t)
          if (t != j) base = base * std::size_t(ch.y_size) + std::size_t(ys[std::size_t(t)]);
        base *= std::size_t(ch.s_size);
        double pq = p[xs[std::size_t(i)]] * q[ys[std::size_t(j)]];
        for (int z = 0; z < ch.z_size; ++z) {
          double acc = 0.0;
          for (int s = 0; s < ch.s_size; ++s)
            acc += ch(xs[std::size_t(i)], ys[std::size_t(j)], s, z) * tab.table[base + std::size_t(s)];
          out[flat * std::size_t(ch.z_size) + std::size_t(z)] = pq * acc;
        }
        ++flat;
        return;
      }
      for (int v = 0; v < ch.y_size; ++v) {
        ys[std::size_t(pos)] = v;
        rec_y(pos + 1);
      }
    };
    std::function<void(int)> rec_x = [&](int pos) {
      if (pos == ka) {
        rec_y(0);
        return;
      }
      for (int v = 0; v < ch.x_size; ++v) {
        xs[std::size_t(pos)] = v;
        rec_x(pos + 1);
      }
    };
    rec_x(0);
    return out;
  };

  std::vector<std::vector<double>> dists;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) dists.push_back(dist_for(i, j));
  for (std::size_t i = 0; i < dists.size(); ++i)
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < cells; ++c) d += std::fabs(dists[i][c] - dists[j][c]);
      res.value = std::max(res.value, d);
    }
  return res;
}

// --------------------------------------------------------------------------
// Certificate files: JSON with the mode, dimensions, full table (rationals as
// "p/q" strings when exact), plus the residual and tolerance on record.

inline nlohmann::json certificate_to_json(const SymCert& cert, double residual, double tol) {
  nlohmann::json j;
  j["residual"] = round9(residual);
  j["tol"] = tol;
  auto emit_table = [&](const std::vector<double>& tab, const std::vector<Rat>& exact) {
    nlohmann::json rows = nlohmann::json::array();
    std::size_t s_size = std::visit([](const auto& c) { return std::size_t(c.s_size); }, cert);
    std::size_t nrows = tab.size() / s_size;
    for (std::size_t r = 0; r < nrows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t s = 0; s < s_size; ++s) {
        if (!exact.empty())
          row.push_back(format_rational(exact[r * s_size + s]));
        else
          row.push_back(tab[r * s_size + s]);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  if (std::holds_alternative<SymmetrizerDiag>(cert)) {
    const auto& c = std::get<SymmetrizerDiag>(cert);
    j["mode"] = "diag";
    j["u"] = c.u;
    j["x_size"] = c.x_size;
    j["y_size"] = c.y_size;
    j["s_size"] = c.s_size;
    j["table"] = emit_table(c.table, c.table_exact);
  } else {
    const auto& c = std::get<SymmetrizerRect>(cert);
    j["mode"] = "rect";
    j["a"] = c.a;
    j["b"] = c.b;
    j["x_size"] = c.x_size;
    j["y_size"] = c.y_size;
    j["s_size"] = c.s_size;
    j["table"] = emit_table(c.table, c.table_exact);
  }
  return j;
}

inline SymCert certificate_from_json(const nlohmann::json& j) {
  auto read_table = [&](std::size_t nrows, std::size_t s_size, std::vector<double>& tab, std::vector<Rat>& exact) {
    const auto& rows = j.at("table");
    if (!rows.is_array() || rows.size() != nrows)
      throw Error(Errc::dimension_mismatch, "certificate table has the wrong row count");
    tab.assign(nrows * s_size, 0.0);
    bool all_exact = true;
    std::vector<Rat> ex(nrows * s_size, Rat(0));
    for (std::size_t r = 0; r < nrows; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || row.size() != s_size)
        throw Error(Errc::dimension_mismatch, "certificate row has the wrong length");
      for (std::size_t s = 0; s < s_size; ++s) {
        const auto& cell = row[s];
        if (cell.is_string()) {
          Rat v = parse_rational(cell.get<std::string>());
          ex[r * s_size + s] = v;
          tab[r * s_size + s] = to_double(v);
        } else {
          all_exact = false;
          tab[r * s_size + s] = cell.get<double>();
        }
      }
    }
    if (all_exact) exact = std::move(ex);
  };

  std::string mode = j.at("mode").get<std::string>();
  if (mode == "diag") {
    SymmetrizerDiag c;
    c.u = j.at("u").get<int>();
    c.x_size = j.at("x_size").get<int>();
    c.y_size = j.at("y_size").get<int>();
    c.s_size = j.at("s_size").get<int>();
    read_table(c.rows(), std::size_t(c.s_size), c.table, c.table_exact);
    return c;
  }
  if (mode == "rect") {
    SymmetrizerRect c;
    c.a = j.at("a").get<int>();
    c.b = j.at("b").get<int>();
    c.x_size = j.at("x_size").get<int>();
    c.y_size = j.at("y_size").get<int>();
    c.s_size = j.at("s_size").get<int>();
    read_table(c.rows(), std::size_t(c.s_size), c.table, c.table_exact);
    return c;
  }
  throw Error(Errc::parse_error, "certificate mode must be \"diag\" or \"rect\"");
}

}  // namespace avmac::sym
