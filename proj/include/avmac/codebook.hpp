#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "avmac/channel.hpp"
#include "avmac/util.hpp"

namespace avmac::code {

struct Codebook {
  int n = 0;  // blocklength
  int m = 0;  // messages per sender
  int x_size = 0, y_size = 0;
  std::vector<std::vector<int>> xwords, ywords;
  bool constant_composition = false;
  std::vector<int> x_counts, y_counts;  // letter counts when constant composition

  double rate() const { return std::log2(double(m)) / double(n); }

  Dist px_type() const { return counts_to_dist(x_counts); }
  Dist py_type() const { return counts_to_dist(y_counts); }

 private:
  Dist counts_to_dist(const std::vector<int>& c) const {
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = double(c[i]) / n;
    return Dist(std::move(p));
  }
};

namespace detail {

inline std::vector<int> word_counts(const std::vector<int>& w, int alphabet) {
  std::vector<int> c(std::size_t(alphabet), 0);
  for (int v : w) {
    if (v < 0 || v >= alphabet) throw Error(Errc::symbol_out_of_range, "codeword symbol out of range");
    ++c[std::size_t(v)];
  }
  return c;
}

// enumerate all length-n words over the alphabet with the given letter
// counts (empty counts = unrestricted), lexicographic order
inline void enumerate_words(int n, int alphabet, const std::vector<int>& counts,
                            const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> cur(std::size_t(n), 0);
  std::vector<int> left = counts;
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      fn(cur);
      return;
    }
    for (int v = 0; v < alphabet; ++v) {
      if (!left.empty()) {
        if (left[std::size_t(v)] == 0) continue;
        --left[std::size_t(v)];
      }
      cur[std::size_t(pos)] = v;
      rec(pos + 1);
      if (!left.empty()) ++left[std::size_t(v)];
    }
  };
  rec(0);
}

// m distinct words drawn uniformly without replacement; counts empty means
// any word is eligible
inline std::vector<std::vector<int>> sample_distinct(int n, int alphabet, const std::vector<int>& counts,
                                                     int m, Prng& rng, unsigned long long population) {
  std::vector<std::vector<int>> out;
  if (population <= (1ULL << 20)) {
    std::vector<std::vector<int>> all;
    all.reserve(std::size_t(population));
    enumerate_words(n, alphabet, counts, [&](const std::vector<int>& w) { all.push_back(w); });
    // partial Fisher-Yates
    for (int i = 0; i < m; ++i) {
      std::size_t j = std::size_t(i) + std::size_t(rng.next_below(all.size() - std::size_t(i)));
      std::swap(all[std::size_t(i)], all[j]);
      out.push_back(all[std::size_t(i)]);
    }
    return out;
  }
  std::set<std::vector<int>> seen;
  std::vector<int> base;
  if (!counts.empty()) {
    for (int v = 0; v < alphabet; ++v)
      for (int i = 0; i < counts[std::size_t(v)]; ++i) base.push_back(v);
  }
  while (int(out.size()) < m) {
    std::vector<int> w;
    if (!counts.empty()) {
      w = base;
      rng.shuffle(w);
    } else {
      w.resize(std::size_t(n));
      for (auto& v : w) v = rng.next_int(alphabet);
    }
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace detail

// Constant-composition code: m distinct words per sender, every word with the
// exact letter counts n * P, drawn uniformly and reproducibly from the seed.
inline Codebook build_code(const Dist& px, const Dist& py, int m, int n, std::uint64_t seed,
                           int x_size = 0, int y_size = 0) {
  if (m < 1 || n < 1) throw Error(Errc::bad_argument, "need M >= 1 and n >= 1");
  if (x_size == 0) x_size = px.size();
  if (y_size == 0) y_size = py.size();

  auto to_counts = [&](const Dist& p, int alphabet, const char* who) {
    std::vector<int> c(std::size_t(alphabet), 0);
    for (int v = 0; v < alphabet; ++v) {
      double exact = p[v] * n;
      c[std::size_t(v)] = int(std::lround(exact));
      if (std::fabs(exact - double(c[std::size_t(v)])) > 1e-9)
        throw Error(Errc::type_not_integral,
                    std::string(who) + " type entry " + fmt_g9(p[v]) + " is not integral at n = " + std::to_string(n));
    }
    return c;
  };
  Codebook cb;
  cb.n = n;
  cb.m = m;
  cb.x_size = x_size;
  cb.y_size = y_size;
  cb.constant_composition = true;
  cb.x_counts = to_counts(px, x_size, "P_X");
  cb.y_counts = to_counts(py, y_size, "P_Y");

  auto population_x = multinomial(cb.x_counts);
  auto population_y = multinomial(cb.y_counts);
  if (population_x < (unsigned long long)(m) || population_y < (unsigned long long)(m))
    throw Error(Errc::not_enough_sequences,
                "only " + std::to_string(std::min(population_x, population_y)) + " sequences of this type exist");

  Prng rx(seed, 1), ry(seed, 2);
  cb.xwords = detail::sample_distinct(n, x_size, cb.x_counts, m, rx, population_x);
  cb.ywords = detail::sample_distinct(n, y_size, cb.y_counts, m, ry, population_y);
  return cb;
}

// Arbitrary-word code (no composition constraint): m distinct words per
// sender drawn uniformly from the full space.
inline Codebook random_distinct_code(int n, int m, int x_size, int y_size, std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error(Errc::bad_argument, "need M >= 1 and n >= 1");
  auto pop = [&](int alphabet) {
    unsigned long long p = 1;
    for (int i = 0; i < n; ++i) {
      if (p > (~0ULL) / (unsigned long long)(alphabet)) return ~0ULL;
      p *= (unsigned long long)(alphabet);
    }
    return p;
  };
  unsigned long long px = pop(x_size), py = pop(y_size);
  if (px < (unsigned long long)(m) || py < (unsigned long long)(m))
    throw Error(Errc::not_enough_sequences, "alphabet^n is smaller than M");
  Codebook cb;
  cb.n = n;
  cb.m = m;
  cb.x_size = x_size;
  cb.y_size = y_size;
  cb.constant_composition = false;
  Prng rx(seed, 1), ry(seed, 2);
  cb.xwords = detail::sample_distinct(n, x_size, {}, m, rx, px);
  cb.ywords = detail::sample_distinct(n, y_size, {}, m, ry, py);
  return cb;
}

// Wrap explicit word lists; constant composition is detected, not required.
inline Codebook from_words(std::vector<std::vector<int>> xwords, std::vector<std::vector<int>> ywords,
                           int x_size, int y_size) {
  if (xwords.empty() || ywords.empty() || xwords.size() != ywords.size())
    throw Error(Errc::bad_argument, "need equally many words per sender");
  Codebook cb;
  cb.n = int(xwords[0].size());
  cb.m = int(xwords.size());
  cb.x_size = x_size;
  cb.y_size = y_size;
  for (const auto& w : xwords)
    if (int(w.size()) != cb.n) throw Error(Errc::length_mismatch, "codeword lengths differ");
  for (const auto& w : ywords)
    if (int(w.size()) != cb.n) throw Error(Errc::length_mismatch, "codeword lengths differ");
  cb.x_counts = detail::word_counts(xwords[0], x_size);
  cb.y_counts = detail::word_counts(ywords[0], y_size);
  cb.constant_composition = true;
  for (const auto& w : xwords)
    if (detail::word_counts(w, x_size) != cb.x_counts) cb.constant_composition = false;
  for (const auto& w : ywords)
    if (detail::word_counts(w, y_size) != cb.y_counts) cb.constant_composition = false;
  if (!cb.constant_composition) {
    cb.x_counts.clear();
    cb.y_counts.clear();
  }
  cb.xwords = std::move(xwords);
  cb.ywords = std::move(ywords);
  return cb;
}

}  // namespace avmac::code
