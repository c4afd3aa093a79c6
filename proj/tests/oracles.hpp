#pragma once

// Test-only oracles, independent of the solver paths they cross-check.

#include <vector>

#include "avmac/channel.hpp"
#include "avmac/listcomb.hpp"
#include "avmac/symmetrizability.hpp"

namespace testutil {

// Exhaustive search over diagonal u=1 certificate tables for binary X, Y and
// binary S, discretized at 1/steps. Returns the best full-permutation
// residual found (early-bailed rows use the bail threshold).
struct GridBest {
  double residual = std::numeric_limits<double>::infinity();
  avmac::sym::SymCert table;
};

inline GridBest grid_oracle_diag_u1(const avmac::Avmac& ch, int steps, double bail) {
  if (ch.x_size != 2 || ch.y_size != 2 || ch.s_size != 2)
    throw avmac::Error(avmac::Errc::bad_argument, "grid oracle handles binary X, Y, S only");
  GridBest best;
  avmac::sym::SymmetrizerDiag cert;
  cert.u = 1;
  cert.x_size = 2;
  cert.y_size = 2;
  cert.s_size = 2;
  cert.table.assign(8, 0.0);
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps; ++b)
      for (int c = 0; c <= steps; ++c)
        for (int d = 0; d <= steps; ++d) {
          const double p[4] = {double(a) / steps, double(b) / steps, double(c) / steps, double(d) / steps};
          for (int row = 0; row < 4; ++row) {
            cert.table[std::size_t(2 * row)] = p[row];
            cert.table[std::size_t(2 * row + 1)] = 1.0 - p[row];
          }
          double r = avmac::sym::verify_certificate(ch, cert, std::min(bail, best.residual));
          if (r < best.residual) {
            best.residual = r;
            best.table = cert;
          }
        }
  return best;
}

// Same idea for the rectangle condition with a = 0, b = 1 (one y tail).
inline GridBest grid_oracle_rect01(const avmac::Avmac& ch, int steps, double bail) {
  if (ch.y_size != 2 || ch.s_size != 2)
    throw avmac::Error(avmac::Errc::bad_argument, "rect grid oracle handles binary Y, S only");
  GridBest best;
  avmac::sym::SymmetrizerRect cert;
  cert.a = 0;
  cert.b = 1;
  cert.x_size = ch.x_size;
  cert.y_size = 2;
  cert.s_size = 2;
  cert.table.assign(4, 0.0);
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps; ++b) {
      const double p[2] = {double(a) / steps, double(b) / steps};
      for (int row = 0; row < 2; ++row) {
        cert.table[std::size_t(2 * row)] = p[row];
        cert.table[std::size_t(2 * row + 1)] = 1.0 - p[row];
      }
      double r = avmac::sym::verify_certificate(ch, cert, std::min(bail, best.residual));
      if (r < best.residual) {
        best.residual = r;
        best.table = cert;
      }
    }
  return best;
}

// Is there a K of exactly this size avoiding both patterns? Direct subset
// enumeration, independent of the backtracking search.
inline bool exists_avoiding_set(int a, int m, int size) {
  const int total = m * m;
  if (size > total) return false;
  std::vector<int> idx(std::size_t(size), 0);
  for (int i = 0; i < size; ++i) idx[std::size_t(i)] = i;
  for (;;) {
    std::vector<std::pair<int, int>> cells;
    for (int v : idx) cells.emplace_back(v / m + 1, v % m + 1);
    auto k = avmac::listcomb::CellSet::of(m, cells);
    if (!avmac::listcomb::contains_diagonal(k, a) && !avmac::listcomb::contains_rectangle(k, a)) return true;
    int i = size - 1;
    while (i >= 0 && idx[std::size_t(i)] == total - size + i) --i;
    if (i < 0) break;
    ++idx[std::size_t(i)];
    for (int j = i + 1; j < size; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
  }
  return false;
}

}  // namespace testutil
