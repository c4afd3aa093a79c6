#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "avmac/channel.hpp"
#include "avmac/codebook.hpp"
#include "avmac/listdecode.hpp"
#include "avmac/symmetrizability.hpp"
#include "avmac/util.hpp"

namespace avmac::jammer {

// ((M-U)/M)^2 (1 - L/(U+1)), floored at zero
inline double theorem2_bound(int m, int u, int l) {
  if (u < 0 || m <= u) throw Error(Errc::bad_argument, "need M > U >= 0");
  if (l < 1) throw Error(Errc::bad_argument, "need L >= 1");
  double frac = double(m - u) / double(m);
  double v = frac * frac * (1.0 - double(l) / double(u + 1));
  return v < 0.0 ? 0.0 : v;
}

struct AttackSpec {
  sym::SymCert cert;
  long trials = 1000;
  std::uint64_t seed = 0;
  double cert_tol = 1e-9;  // certificate is re-verified before use

  int symmetrizability() const {
    if (std::holds_alternative<sym::SymmetrizerDiag>(cert)) return std::get<sym::SymmetrizerDiag>(cert).u;
    const auto& r = std::get<sym::SymmetrizerRect>(cert);
    return (r.a + 1) * (r.b + 1) - 1;
  }
  bool is_rect() const { return std::holds_alternative<sym::SymmetrizerRect>(cert); }
};

struct AttackSample {
  std::vector<std::pair<int, int>> k_cells;  // diag mode, 1-based, lex sorted
  std::vector<int> i_set, j_set;             // rect mode, 1-based
  std::vector<int> s;
};

// K uniform on the U-diagonal index sets (resp. (I,J) uniform on subset
// pairs), then s drawn letterwise from the certificate row selected by the
// chosen codewords.
inline AttackSample sample_attack_state(const AttackSpec& spec, const code::Codebook& cb, Prng& rng) {
  AttackSample out;
  const int m = cb.m;
  auto pick_subset = [&](int count) {
    std::set<int> chosen;
    while (int(chosen.size()) < count) chosen.insert(rng.next_int(m));
    return std::vector<int>(chosen.begin(), chosen.end());
  };

  if (!spec.is_rect()) {
    const auto& cert = std::get<sym::SymmetrizerDiag>(spec.cert);
    const int u = cert.u;
    if (m <= u) throw Error(Errc::bad_argument, "need M > U distinct messages");
    auto rows = pick_subset(u);
    auto cols = pick_subset(u);
    rng.shuffle(cols);  // uniform bijection between sorted rows and columns
    for (int k = 0; k < u; ++k) out.k_cells.emplace_back(rows[std::size_t(k)] + 1, cols[std::size_t(k)] + 1);
    std::sort(out.k_cells.begin(), out.k_cells.end());

    out.s.resize(std::size_t(cb.n));
    std::vector<int> tail(std::size_t(u), 0);
    std::vector<double> row_dist(std::size_t(cert.s_size), 0);
    for (int t = 0; t < cb.n; ++t) {
      for (int k = 0; k < u; ++k) {
        int xi = cb.xwords[std::size_t(out.k_cells[std::size_t(k)].first - 1)][std::size_t(t)];
        int yj = cb.ywords[std::size_t(out.k_cells[std::size_t(k)].second - 1)][std::size_t(t)];
        tail[std::size_t(k)] = xi * cb.y_size + yj;
      }
      std::size_t row = cert.row_of(tail);
      for (int s = 0; s < cert.s_size; ++s) row_dist[std::size_t(s)] = cert.value(row, s);
      out.s[std::size_t(t)] = rng.sample(row_dist);
    }
    return out;
  }

  const auto& cert = std::get<sym::SymmetrizerRect>(spec.cert);
  if (m < std::max(cert.a, cert.b)) throw Error(Errc::bad_argument, "need M >= max(a, b)");
  auto iset = pick_subset(cert.a);
  auto jset = pick_subset(cert.b);
  for (int v : iset) out.i_set.push_back(v + 1);
  for (int v : jset) out.j_set.push_back(v + 1);

  out.s.resize(std::size_t(cb.n));
  std::vector<int> xt(std::size_t(cert.a), 0), yt(std::size_t(cert.b), 0);
  std::vector<double> row_dist(std::size_t(cert.s_size), 0);
  for (int t = 0; t < cb.n; ++t) {
    for (std::size_t k = 0; k < iset.size(); ++k) xt[k] = cb.xwords[std::size_t(iset[k])][std::size_t(t)];
    for (std::size_t k = 0; k < jset.size(); ++k) yt[k] = cb.ywords[std::size_t(jset[k])][std::size_t(t)];
    std::size_t row = cert.row_of(xt, yt);
    for (int s = 0; s < cert.s_size; ++s) row_dist[std::size_t(s)] = cert.value(row, s);
    out.s[std::size_t(t)] = rng.sample(row_dist);
  }
  return out;
}

struct AttackResult {
  bool not_applicable = false;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  long trials = 0;
  bool pass = false;
  bool extrapolated = false;  // rect mode reuses the diagonal bound form
  long truncations = 0;       // decoder outputs capped to L entries
  double cert_residual = 0.0;
};

// Monte Carlo estimate of the K-averaged expected average error under the
// symmetrizing state attack, against the closed-form lower bound. The bound
// holds for any decoder emitting at most L pairs, so oversized decoder
// output is truncated (lexicographically) to keep the comparison sound.
inline AttackResult run_attack(const Avmac& ch, const code::Codebook& cb,
                               const listdecode::DecoderParams& params, const AttackSpec& spec) {
  AttackResult res;
  res.extrapolated = spec.is_rect();

  const int u = spec.symmetrizability();
  if (u == 0) {
    res.not_applicable = true;
    return res;
  }

  res.cert_residual = sym::verify_certificate(ch, spec.cert);
  if (res.cert_residual > spec.cert_tol)
    throw Error(Errc::bad_argument,
                "certificate residual " + fmt_g9(res.cert_residual) + " exceeds tol " + fmt_g9(spec.cert_tol));

  // the index combinatorics require distinct codewords
  auto distinct = [](const std::vector<std::vector<int>>& words) {
    std::set<std::vector<int>> s(words.begin(), words.end());
    return s.size() == words.size();
  };
  if (!distinct(cb.xwords) || !distinct(cb.ywords))
    throw Error(Errc::bad_argument, "attack requires distinct codewords per sender");
  if (cb.m <= u) throw Error(Errc::bad_argument, "need M > U");

  const int m = cb.m;
  res.bound = theorem2_bound(m, u, params.L);
  res.trials = spec.trials;

  listdecode::ListDecoder dec(ch, cb, params);
  std::vector<unsigned char> errors(std::size_t(spec.trials), 0);
  std::vector<unsigned char> truncated(std::size_t(spec.trials), 0);

  parallel_for(std::size_t(spec.trials), [&](std::size_t t) {
    Prng rng(spec.seed, t);
    auto sample = sample_attack_state(spec, cb, rng);
    int i = rng.next_int(m), j = rng.next_int(m);
    std::vector<int> z(std::size_t(cb.n), 0);
    for (int pos = 0; pos < cb.n; ++pos) {
      double uni = rng.next_double(), acc = 0.0;
      int zv = ch.z_size - 1;
      for (int cand = 0; cand < ch.z_size; ++cand) {
        acc += ch(cb.xwords[std::size_t(i)][std::size_t(pos)], cb.ywords[std::size_t(j)][std::size_t(pos)],
                  sample.s[std::size_t(pos)], cand);
        if (uni < acc) {
          zv = cand;
          break;
        }
      }
      z[std::size_t(pos)] = zv;
    }
    auto decoded = dec.decode(z);
    auto list = decoded.list;
    if (int(list.size()) > params.L) {
      list.resize(std::size_t(params.L));
      truncated[t] = 1;
    }
    errors[t] = std::binary_search(list.begin(), list.end(), std::make_pair(i + 1, j + 1)) ? 0 : 1;
  });

  long bad = 0;
  for (auto e : errors) bad += e;
  for (auto e : truncated) res.truncations += e;
  res.estimate = double(bad) / double(spec.trials);
  res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / double(spec.trials));
  res.pass = res.estimate >= res.bound - 3.0 * res.std_error;
  return res;
}

}  // namespace avmac::jammer
