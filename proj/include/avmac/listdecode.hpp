#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "avmac/channel.hpp"
#include "avmac/codebook.hpp"
#include "avmac/util.hpp"

namespace avmac::listdecode {

struct DecoderParams {
  double eta = 0.1;
  int L = 1;
  std::size_t s_budget = std::size_t(1) << 16;  // cap on |S|^n state enumeration
};

struct DecodeResult {
  std::vector<std::pair<int, int>> gamma;  // 1-based message pairs, lexicographic
  std::vector<std::pair<int, int>> list;
  bool fallback_used = false;
  std::map<std::pair<int, int>, std::vector<int>> witnesses;  // s achieving the tests
};

namespace detail {

inline std::size_t pow_or_cap(std::size_t base, int exp, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// entropy (bits) of the joint empirical type of aligned sequences, via
// packed per-position codes
inline double entropy_of_seqs(const std::vector<const std::vector<int>*>& seqs, const std::vector<int>& sizes,
                              std::vector<std::uint64_t>& buf) {
  if (seqs.empty()) return 0.0;
  int bits = 0;
  for (int sz : sizes) bits += std::bit_width(unsigned(sz - 1));
  if (bits > 64) throw Error(Errc::problem_too_large, "joint type axes exceed 64 packed bits");
  const std::size_t n = seqs[0]->size();
  buf.clear();
  buf.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::uint64_t code = 0;
    for (std::size_t a = 0; a < seqs.size(); ++a)
      code = (code << std::bit_width(unsigned(sizes[a] - 1))) | std::uint64_t((*seqs[a])[t]);
    buf.push_back(code);
  }
  std::sort(buf.begin(), buf.end());
  double h = 0.0;
  std::size_t run = 1;
  for (std::size_t t = 1; t <= n; ++t) {
    if (t < n && buf[t] == buf[t - 1]) {
      ++run;
      continue;
    }
    double p = double(run) / double(n);
    h -= p * std::log2(p);
    run = 1;
  }
  return h < 0.0 ? 0.0 : h;
}

// I(left ∧ right | given) from sequences, in bits
inline double mi_of_seqs(const std::vector<const std::vector<int>*>& left, const std::vector<int>& left_sizes,
                         const std::vector<const std::vector<int>*>& right, const std::vector<int>& right_sizes,
                         const std::vector<const std::vector<int>*>& given, const std::vector<int>& given_sizes,
                         std::vector<std::uint64_t>& buf) {
  auto cat = [](std::vector<const std::vector<int>*> a, const std::vector<const std::vector<int>*>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  auto cats = [](std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  double h_lg = entropy_of_seqs(cat(left, given), cats(left_sizes, given_sizes), buf);
  double h_rg = entropy_of_seqs(cat(right, given), cats(right_sizes, given_sizes), buf);
  double h_g = entropy_of_seqs(given, given_sizes, buf);
  double h_all = entropy_of_seqs(cat(cat(left, right), given), cats(cats(left_sizes, right_sizes), given_sizes), buf);
  double mi = h_lg + h_rg - h_g - h_all;
  return mi < 0.0 ? 0.0 : mi;
}

// D(type(x,y,s,z) || P_X x P_Y x P_S x W) in bits for one concrete state
// sequence; P_X, P_Y, P_S are the sequences' own single-letter types.
inline double step1_divergence(const Avmac& ch, const std::vector<int>& xw, const std::vector<int>& yw,
                               const std::vector<int>& s, const std::vector<int>& z) {
  const std::size_t n = xw.size();
  std::vector<double> px(std::size_t(ch.x_size), 0.0), py(std::size_t(ch.y_size), 0.0),
      ps(std::size_t(ch.s_size), 0.0);
  std::unordered_map<std::size_t, int> counts;
  counts.reserve(n * 2);
  for (std::size_t t = 0; t < n; ++t) {
    px[std::size_t(xw[t])] += 1.0;
    py[std::size_t(yw[t])] += 1.0;
    ps[std::size_t(s[t])] += 1.0;
    ++counts[ch.index(xw[t], yw[t], s[t], z[t])];
  }
  for (auto& v : px) v /= double(n);
  for (auto& v : py) v /= double(n);
  for (auto& v : ps) v /= double(n);

  double d = 0.0;
  for (const auto& [cell, k] : counts) {
    std::size_t rest = cell;
    int zz = int(rest % std::size_t(ch.z_size));
    rest /= std::size_t(ch.z_size);
    int ss = int(rest % std::size_t(ch.s_size));
    rest /= std::size_t(ch.s_size);
    int yy = int(rest % std::size_t(ch.y_size));
    int xx = int(rest / std::size_t(ch.y_size));
    double w = ch(xx, yy, ss, zz);
    if (w == 0.0) return std::numeric_limits<double>::infinity();
    double p = double(k) / double(n);
    d += p * std::log2(p / (px[std::size_t(xx)] * py[std::size_t(yy)] * ps[std::size_t(ss)] * w));
  }
  return d < 0.0 ? 0.0 : d;
}

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    return std::size_t(fnv1a64(v.data(), v.size() * sizeof(int)));
  }
};

// The step-1 test for a message pair depends on the joint (x,y,z) cell counts
// only: the best state sequence can be searched over conditional types of s
// given those cells. Verdicts are memoized per cell-count key.
class Step1Cache {
 public:
  Step1Cache(const Avmac& ch, double eta) : ch_(ch), eta_(eta) {}

  struct Entry {
    bool pass = false;
    std::vector<int> assignment;  // per (present-cell, s) state counts when pass
  };

  const Entry& lookup(const std::vector<int>& key, int n) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    Entry e = compute(key, n);
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.emplace(key, std::move(e)).first->second;
  }

  // cell order: (x,y,z) row-major, matching key layout
  std::vector<int> cell_key(const std::vector<int>& xw, const std::vector<int>& yw,
                            const std::vector<int>& z) const {
    std::vector<int> key(std::size_t(ch_.x_size * ch_.y_size * ch_.z_size), 0);
    for (std::size_t t = 0; t < xw.size(); ++t)
      ++key[std::size_t((xw[t] * ch_.y_size + yw[t]) * ch_.z_size + z[t])];
    return key;
  }

 private:
  Entry compute(const std::vector<int>& key, int n) const {
    const int S = ch_.s_size;
    struct Cls {
      int x, y, z, count;
      std::vector<int> allowed;
    };
    std::vector<Cls> classes;
    std::vector<double> px(std::size_t(ch_.x_size), 0.0), py(std::size_t(ch_.y_size), 0.0);
    for (int x = 0; x < ch_.x_size; ++x)
      for (int y = 0; y < ch_.y_size; ++y)
        for (int z = 0; z < ch_.z_size; ++z) {
          int c = key[std::size_t((x * ch_.y_size + y) * ch_.z_size + z)];
          if (c == 0) continue;
          Cls cl{x, y, z, c, {}};
          for (int s = 0; s < S; ++s)
            if (ch_(x, y, s, z) > 0.0) cl.allowed.push_back(s);
          if (cl.allowed.empty()) return {};  // divergence is infinite for every s
          px[std::size_t(x)] += double(c) / n;
          py[std::size_t(y)] += double(c) / n;
          classes.push_back(std::move(cl));
        }

    Entry best;
    std::vector<int> k(classes.size() * std::size_t(S), 0);
    std::vector<int> s_tot(std::size_t(S), 0);

    std::function<bool(std::size_t)> rec = [&](std::size_t ci) -> bool {
      if (ci == classes.size()) {
        double d = 0.0;
        for (std::size_t c = 0; c < classes.size(); ++c) {
          const Cls& cl = classes[c];
          for (int s : cl.allowed) {
            int kk = k[c * std::size_t(S) + std::size_t(s)];
            if (kk == 0) continue;
            double p = double(kk) / n;
            double ps = double(s_tot[std::size_t(s)]) / n;
            d += p * std::log2(p / (px[std::size_t(cl.x)] * py[std::size_t(cl.y)] * ps *
                                    ch_(cl.x, cl.y, s, cl.z)));
          }
        }
        if (d <= eta_ + 1e-15) {
          best.pass = true;
          best.assignment = k;
          return true;
        }
        return false;
      }
      const Cls& cl = classes[ci];
      // compositions of cl.count over the allowed states
      std::function<bool(std::size_t, int)> comp = [&](std::size_t ai, int left) -> bool {
        if (ai + 1 == cl.allowed.size()) {
          int s = cl.allowed[ai];
          k[ci * std::size_t(S) + std::size_t(s)] = left;
          s_tot[std::size_t(s)] += left;
          bool done = rec(ci + 1);
          s_tot[std::size_t(s)] -= left;
          k[ci * std::size_t(S) + std::size_t(s)] = 0;
          return done;
        }
        for (int v = 0; v <= left; ++v) {
          int s = cl.allowed[ai];
          k[ci * std::size_t(S) + std::size_t(s)] = v;
          s_tot[std::size_t(s)] += v;
          bool done = comp(ai + 1, left - v);
          s_tot[std::size_t(s)] -= v;
          k[ci * std::size_t(S) + std::size_t(s)] = 0;
          if (done) return true;
        }
        return false;
      };
      return comp(0, cl.count);
    };
    rec(0);
    return best;
  }

  const Avmac& ch_;
  double eta_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::vector<int>, Entry, VecHash> memo_;
};

}  // namespace detail

// Two-step list decoder over a fixed channel/code/parameter triple. Decoding
// different outputs from multiple threads is safe; the step-1 verdict cache
// is shared under a lock.
class ListDecoder {
 public:
  ListDecoder(const Avmac& ch, const code::Codebook& cb, DecoderParams params)
      : ch_(ch), cb_(cb), params_(params), cache_(ch, params.eta) {
    if (cb.x_size != ch.x_size || cb.y_size != ch.y_size)
      throw Error(Errc::dimension_mismatch, "codebook alphabets do not match the channel");
    if (params.L < 1) throw Error(Errc::bad_argument, "L must be >= 1");
    if (params.eta < 0.0) throw Error(Errc::bad_argument, "eta must be >= 0");
    n_states_ = detail::pow_or_cap(std::size_t(ch.s_size), cb.n, params.s_budget);
    // states with positive kernel mass per (x,y,z) cell; all other states
    // make the step-1 divergence infinite and are never enumerated
    allowed_.resize(std::size_t(ch.x_size) * ch.y_size * ch.z_size);
    for (int x = 0; x < ch.x_size; ++x)
      for (int y = 0; y < ch.y_size; ++y)
        for (int z = 0; z < ch.z_size; ++z)
          for (int s = 0; s < ch.s_size; ++s)
            if (ch(x, y, s, z) > 0.0)
              allowed_[std::size_t((x * ch.y_size + y) * ch.z_size + z)].push_back(s);
  }

  const DecoderParams& params() const { return params_; }

  DecodeResult decode(const std::vector<int>& z) const {
    if (int(z.size()) != cb_.n) throw Error(Errc::length_mismatch, "output length differs from the blocklength");
    if (n_states_ > params_.s_budget)
      throw Error(Errc::state_space_too_large,
                  "|S|^n exceeds the state enumeration budget; reduce n or |S|");

    DecodeResult res;
    const int M = cb_.m;

    // step 1: joint-type divergence test, memoized on (x,y,z) cell counts
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        auto key = cache_.cell_key(cb_.xwords[std::size_t(i)], cb_.ywords[std::size_t(j)], z);
        if (cache_.lookup(key, cb_.n).pass) res.gamma.emplace_back(i + 1, j + 1);
      }

    // step 2: one state sequence must pass the divergence test and the
    // conditional-information test against every (L+1)-subset of gamma
    for (auto& [i1, j1] : res.gamma) {
      int i = i1 - 1, j = j1 - 1;
      std::vector<std::pair<int, int>> others;
      for (auto& p : res.gamma)
        if (p != std::make_pair(i1, j1)) others.push_back(p);

      std::vector<std::vector<std::pair<int, int>>> subsets;
      if (int(others.size()) >= params_.L)
        for_each_subset(int(others.size()), params_.L, [&](const std::vector<int>& idx) {
          std::vector<std::pair<int, int>> k = {{i1, j1}};
          for (int t : idx) k.push_back(others[std::size_t(t)]);
          subsets.push_back(std::move(k));
        });

      std::vector<int> s;
      if (subsets.empty()) {
        if (!first_passing_state(i, j, z, s)) continue;  // repairs a borderline cache disagreement
      } else if (!state_for_all_subsets(i, j, z, subsets, s)) {
        continue;
      }
      res.list.emplace_back(i1, j1);
      res.witnesses.emplace(std::make_pair(i1, j1), std::move(s));
    }

    if (res.list.empty()) {
      res.list = {{1, 1}};
      res.fallback_used = true;
    }
    return res;
  }

 private:
  // reconstruct a concrete state sequence from the cache's passing
  // conditional type (class positions get states in nondecreasing order)
  bool first_passing_state(int i, int j, const std::vector<int>& z, std::vector<int>& out) const {
    auto key = cache_.cell_key(cb_.xwords[std::size_t(i)], cb_.ywords[std::size_t(j)], z);
    const auto& entry = cache_.lookup(key, cb_.n);
    if (!entry.pass) return false;
    const auto& xw = cb_.xwords[std::size_t(i)];
    const auto& yw = cb_.ywords[std::size_t(j)];
    // class index = rank of the (x,y,z) cell among present cells, key order
    std::vector<int> cell_rank(key.size(), -1);
    int rank = 0;
    for (std::size_t c = 0; c < key.size(); ++c)
      if (key[c] > 0) cell_rank[c] = rank++;
    std::vector<int> remaining = entry.assignment;
    out.assign(z.size(), 0);
    for (std::size_t t = 0; t < z.size(); ++t) {
      std::size_t cell = std::size_t((xw[t] * ch_.y_size + yw[t]) * ch_.z_size + z[t]);
      int ci = cell_rank[cell];
      for (int s = 0; s < ch_.s_size; ++s) {
        int& left = remaining[std::size_t(ci) * std::size_t(ch_.s_size) + std::size_t(s)];
        if (left > 0) {
          --left;
          out[t] = s;
          break;
        }
      }
    }
    return true;
  }

  // packed-code entropy over n positions; `extra` appends the state symbol
  static double run_entropy(std::vector<std::uint64_t>& buf) {
    std::sort(buf.begin(), buf.end());
    const double n = double(buf.size());
    double h = 0.0;
    std::size_t run = 1;
    for (std::size_t t = 1; t <= buf.size(); ++t) {
      if (t < buf.size() && buf[t] == buf[t - 1]) {
        ++run;
        continue;
      }
      double p = double(run) / n;
      h -= p * std::log2(p);
      run = 1;
    }
    return h < 0.0 ? 0.0 : h;
  }

  // Walks only state sequences that keep every per-letter kernel value
  // positive, maintaining the (x,y,z)-class state counts incrementally so the
  // divergence at a leaf is a short sum. The information tests share the
  // H(x,y,z,s) and H(s) terms across subsets.
  bool state_for_all_subsets(int i, int j, const std::vector<int>& z,
                             const std::vector<std::vector<std::pair<int, int>>>& subsets,
                             std::vector<int>& out) const {
    const auto& xw = cb_.xwords[std::size_t(i)];
    const auto& yw = cb_.ywords[std::size_t(j)];
    const std::size_t n = z.size();
    const int S = ch_.s_size;
    const int sbits = std::bit_width(unsigned(S - 1));

    // (x,y,z) classes present in this transmission
    std::vector<int> cell_class(std::size_t(ch_.x_size * ch_.y_size * ch_.z_size), -1);
    std::vector<int> class_cell;
    std::vector<int> pos_class(n);
    for (std::size_t t = 0; t < n; ++t) {
      int cell = (xw[t] * ch_.y_size + yw[t]) * ch_.z_size + z[t];
      if (cell_class[std::size_t(cell)] < 0) {
        cell_class[std::size_t(cell)] = int(class_cell.size());
        class_cell.push_back(cell);
      }
      pos_class[t] = cell_class[std::size_t(cell)];
    }
    const std::size_t n_classes = class_cell.size();
    std::vector<double> px(std::size_t(ch_.x_size), 0.0), py(std::size_t(ch_.y_size), 0.0);
    std::vector<int> class_count(n_classes, 0);
    for (std::size_t t = 0; t < n; ++t) {
      ++class_count[std::size_t(pos_class[t])];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
      int rest = class_cell[c] / ch_.z_size;
      px[std::size_t(rest / ch_.y_size)] += double(class_count[c]) / double(n);
      py[std::size_t(rest % ch_.y_size)] += double(class_count[c]) / double(n);
    }

    // packed (x,y,z) codes and per-subset packed tail codes
    int left_bits = std::bit_width(unsigned(ch_.x_size - 1)) + std::bit_width(unsigned(ch_.y_size - 1)) +
                    std::bit_width(unsigned(ch_.z_size - 1));
    std::vector<std::uint64_t> left_code(n, 0);
    for (std::size_t t = 0; t < n; ++t)
      left_code[t] = ((std::uint64_t(xw[t]) << std::bit_width(unsigned(ch_.y_size - 1)) | std::uint64_t(yw[t]))
                          << std::bit_width(unsigned(ch_.z_size - 1))) |
                     std::uint64_t(z[t]);

    struct SubsetCtx {
      std::vector<std::uint64_t> tail_code;
      int tail_bits = 0;
    };
    std::vector<SubsetCtx> ctxs;
    ctxs.reserve(subsets.size());
    for (const auto& k : subsets) {
      std::set<int> rows, cols;
      for (auto& [r, c] : k) {
        rows.insert(r);
        cols.insert(c);
      }
      SubsetCtx ctx;
      ctx.tail_code.assign(n, 0);
      for (int r : rows)
        if (r != i + 1) {
          int bits = std::bit_width(unsigned(ch_.x_size - 1));
          const auto& w = cb_.xwords[std::size_t(r - 1)];
          for (std::size_t t = 0; t < n; ++t) ctx.tail_code[t] = (ctx.tail_code[t] << bits) | std::uint64_t(w[t]);
          ctx.tail_bits += bits;
        }
      for (int c : cols)
        if (c != j + 1) {
          int bits = std::bit_width(unsigned(ch_.y_size - 1));
          const auto& w = cb_.ywords[std::size_t(c - 1)];
          for (std::size_t t = 0; t < n; ++t) ctx.tail_code[t] = (ctx.tail_code[t] << bits) | std::uint64_t(w[t]);
          ctx.tail_bits += bits;
        }
      if (left_bits + ctx.tail_bits + sbits > 64)
        throw Error(Errc::problem_too_large, "joint type axes exceed 64 packed bits");
      ctxs.push_back(std::move(ctx));
    }

    // incremental conditional-type counts
    std::vector<int> k_counts(n_classes * std::size_t(S), 0);
    std::vector<int> s_tot(std::size_t(S), 0);
    std::vector<int> s(n, 0);
    std::vector<std::uint64_t> buf;
    buf.reserve(n);

    auto leaf_divergence = [&]() {
      double d = 0.0;
      for (std::size_t c = 0; c < n_classes; ++c) {
        int cell = class_cell[c];
        int zz = cell % ch_.z_size, rest = cell / ch_.z_size;
        int yy = rest % ch_.y_size, xx = rest / ch_.y_size;
        for (int ss = 0; ss < S; ++ss) {
          int kk = k_counts[c * std::size_t(S) + std::size_t(ss)];
          if (kk == 0) continue;
          double p = double(kk) / double(n);
          double pss = double(s_tot[std::size_t(ss)]) / double(n);
          d += p * std::log2(p / (px[std::size_t(xx)] * py[std::size_t(yy)] * pss * ch_(xx, yy, ss, zz)));
        }
      }
      return d;
    };

    auto leaf_tests = [&]() {
      if (leaf_divergence() > params_.eta + 1e-15) return false;
      buf.assign(s.begin(), s.end());
      double h_s = run_entropy(buf);
      buf.resize(n);
      for (std::size_t t = 0; t < n; ++t) buf[t] = (left_code[t] << sbits) | std::uint64_t(s[t]);
      double h_ls = run_entropy(buf);
      for (const auto& ctx : ctxs) {
        buf.resize(n);
        for (std::size_t t = 0; t < n; ++t) buf[t] = (ctx.tail_code[t] << sbits) | std::uint64_t(s[t]);
        double h_rs = run_entropy(buf);
        buf.resize(n);
        for (std::size_t t = 0; t < n; ++t)
          buf[t] = (((left_code[t] << ctx.tail_bits) | ctx.tail_code[t]) << sbits) | std::uint64_t(s[t]);
        double h_all = run_entropy(buf);
        double mi = h_ls + h_rs - h_s - h_all;
        if (mi > params_.eta + 1e-15) return false;
      }
      return true;
    };

    std::function<bool(std::size_t)> rec = [&](std::size_t t) -> bool {
      if (t == n) {
        if (!leaf_tests()) return false;
        out = s;
        return true;
      }
      const auto& opts = allowed_[std::size_t((xw[t] * ch_.y_size + yw[t]) * ch_.z_size + z[t])];
      int cls = pos_class[t];
      for (int ss : opts) {
        s[t] = ss;
        ++k_counts[std::size_t(cls) * std::size_t(S) + std::size_t(ss)];
        ++s_tot[std::size_t(ss)];
        bool done = rec(t + 1);
        --s_tot[std::size_t(ss)];
        --k_counts[std::size_t(cls) * std::size_t(S) + std::size_t(ss)];
        if (done) return true;
      }
      return false;
    };
    return rec(0);
  }

  const Avmac& ch_;
  const code::Codebook& cb_;
  DecoderParams params_;
  std::size_t n_states_;
  std::vector<std::vector<int>> allowed_;  // per (x,y,z) cell
  mutable detail::Step1Cache cache_;
};

inline DecodeResult decode_list(const Avmac& ch, const code::Codebook& cb, const std::vector<int>& z,
                                const DecoderParams& params) {
  return ListDecoder(ch, cb, params).decode(z);
}

// --------------------------------------------------------------------------
// Good-code sets and their cardinality check.

struct GoodcodeSets {
  std::vector<std::pair<int, int>> a_pairs;  // divergence test, strict
  std::vector<int> b_rows;
  std::vector<int> c_cols;
};

inline GoodcodeSets goodcode_sets(const code::Codebook& cb, const std::vector<int>& s, double eps, int L,
                                  unsigned long long combo_budget = 1000000) {
  if (int(s.size()) != cb.n) throw Error(Errc::length_mismatch, "state sequence length differs from n");
  const int M = cb.m;
  const double r = cb.rate();
  GoodcodeSets out;

  int s_size = 1;
  for (int v : s) s_size = std::max(s_size, v + 1);

  std::vector<std::uint64_t> buf;
  // multiinformation D(P_xys || P_x P_y P_s) = H(x)+H(y)+H(s)-H(x,y,s)
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const auto& xw = cb.xwords[std::size_t(i)];
      const auto& yw = cb.ywords[std::size_t(j)];
      double d = detail::entropy_of_seqs({&xw}, {cb.x_size}, buf) + detail::entropy_of_seqs({&yw}, {cb.y_size}, buf) +
                 detail::entropy_of_seqs({&s}, {s_size}, buf) -
                 detail::entropy_of_seqs({&xw, &yw, &s}, {cb.x_size, cb.y_size, s_size}, buf);
      if (d < eps) out.a_pairs.emplace_back(i + 1, j + 1);
    }

  unsigned long long combos = binomial(unsigned(M - 1), unsigned(L)) * binomial(unsigned(M), unsigned(L + 1));
  if (combos > combo_budget)
    throw Error(Errc::budget_exceeded, "too many (I, J) combinations; reduce M or L");

  double threshold = (2.0 * L + 1.0) * r + eps;
  auto passes_all = [&](int self, bool self_is_row) {
    bool ok = true;
    for_each_subset(M - 1, L, [&](const std::vector<int>& iidx) {
      if (!ok) return;
      std::vector<int> members;  // indices excluding self, remapped
      for (int t : iidx) members.push_back(t >= self ? t + 1 : t);
      for_each_subset(M, L + 1, [&](const std::vector<int>& jidx) {
        if (!ok) return;
        std::vector<const std::vector<int>*> right;
        std::vector<int> right_sizes;
        for (int t : members) {
          right.push_back(self_is_row ? &cb.xwords[std::size_t(t)] : &cb.ywords[std::size_t(t)]);
          right_sizes.push_back(self_is_row ? cb.x_size : cb.y_size);
        }
        for (int t : jidx) {
          right.push_back(self_is_row ? &cb.ywords[std::size_t(t)] : &cb.xwords[std::size_t(t)]);
          right_sizes.push_back(self_is_row ? cb.y_size : cb.x_size);
        }
        right.push_back(&s);
        right_sizes.push_back(s_size);
        const std::vector<int>& selfw = self_is_row ? cb.xwords[std::size_t(self)] : cb.ywords[std::size_t(self)];
        double mi = detail::mi_of_seqs({&selfw}, {self_is_row ? cb.x_size : cb.y_size}, right, right_sizes, {}, {}, buf);
        if (mi >= threshold) ok = false;
      });
    });
    return ok;
  };

  for (int i = 0; i < M; ++i)
    if (passes_all(i, true)) out.b_rows.push_back(i + 1);
  for (int j = 0; j < M; ++j)
    if (passes_all(j, false)) out.c_cols.push_back(j + 1);
  return out;
}

struct GoodcodeReport {
  struct PerState {
    std::vector<int> s;
    std::size_t a_complement = 0, b_complement = 0, c_complement = 0;
    double pair_bound = 0.0, single_bound = 0.0;
    double margin = 0.0;  // min over the three slack values
    bool pass = false;
  };
  std::vector<PerState> per_state;
  bool all_pass = true;
  int worst_index = -1;
};

// Cardinality check on set complements, exponent scaled by the blocklength:
// |A^c| <= 2^{-(eps/4) n} M^2 and |B^c|, |C^c| <= 2^{-(eps/4) n} M.
inline GoodcodeReport goodcode_check(const Avmac& ch, const code::Codebook& cb, double eps,
                                     const std::vector<std::vector<int>>& s_samples, int L) {
  for (const auto& s : s_samples)
    for (int v : s)
      if (v < 0 || v >= ch.s_size) throw Error(Errc::symbol_out_of_range, "state symbol out of range");
  GoodcodeReport rep;
  const int M = cb.m;
  double scale = std::exp2(-(eps / 4.0) * cb.n);
  for (const auto& s : s_samples) {
    auto sets = goodcode_sets(cb, s, eps, L);
    GoodcodeReport::PerState ps;
    ps.s = s;
    ps.a_complement = std::size_t(M) * std::size_t(M) - sets.a_pairs.size();
    ps.b_complement = std::size_t(M) - sets.b_rows.size();
    ps.c_complement = std::size_t(M) - sets.c_cols.size();
    ps.pair_bound = scale * M * M;
    ps.single_bound = scale * M;
    double m1 = ps.pair_bound - double(ps.a_complement);
    double m2 = ps.single_bound - double(ps.b_complement);
    double m3 = ps.single_bound - double(ps.c_complement);
    ps.margin = std::min({m1, m2, m3});
    ps.pass = ps.margin >= 0.0;
    if (!ps.pass) rep.all_pass = false;
    rep.per_state.push_back(std::move(ps));
  }
  for (std::size_t i = 0; i < rep.per_state.size(); ++i)
    if (rep.worst_index < 0 || rep.per_state[i].margin < rep.per_state[std::size_t(rep.worst_index)].margin)
      rep.worst_index = int(i);
  return rep;
}

// --------------------------------------------------------------------------
// Average-error estimation for a fixed state sequence.

struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
  long trials = 0;
};

enum class SimMode { automatic, monte_carlo, exact };

inline ErrorEstimate simulate_error(const Avmac& ch, const code::Codebook& cb, const DecoderParams& params,
                                    const std::vector<int>& s, long trials, std::uint64_t seed,
                                    SimMode mode = SimMode::automatic, std::size_t z_budget = 1 << 14) {
  if (int(s.size()) != cb.n) throw Error(Errc::length_mismatch, "state sequence length differs from n");
  ListDecoder dec(ch, cb, params);
  const int M = cb.m;

  std::size_t z_space = detail::pow_or_cap(std::size_t(ch.z_size), cb.n, z_budget);
  bool exact = mode == SimMode::exact || (mode == SimMode::automatic && z_space <= z_budget);
  if (mode == SimMode::exact && z_space > z_budget)
    throw Error(Errc::problem_too_large, "|Z|^n exceeds the exact enumeration budget");

  ErrorEstimate est;
  if (exact) {
    est.exact = true;
    double err = 0.0;
    std::vector<int> z(std::size_t(cb.n), 0);
    for (;;) {
      auto res = dec.decode(z);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
          bool in_list = std::binary_search(res.list.begin(), res.list.end(), std::make_pair(i + 1, j + 1));
          if (in_list) continue;
          double p = 1.0;
          for (int t = 0; t < cb.n && p > 0.0; ++t)
            p *= ch(cb.xwords[std::size_t(i)][std::size_t(t)], cb.ywords[std::size_t(j)][std::size_t(t)],
                    s[std::size_t(t)], z[std::size_t(t)]);
          err += p;
        }
      std::size_t t = z.size();
      while (t > 0) {
        if (++z[t - 1] < ch.z_size) break;
        z[t - 1] = 0;
        --t;
      }
      if (t == 0) break;
    }
    est.value = err / double(M) / double(M);
    return est;
  }

  if (trials < 1) throw Error(Errc::bad_argument, "trials must be >= 1");
  std::vector<unsigned char> errors(std::size_t(trials), 0);
  parallel_for(std::size_t(trials), [&](std::size_t t) {
    Prng rng(seed, t);
    int i = rng.next_int(M), j = rng.next_int(M);
    std::vector<int> z(std::size_t(cb.n), 0);
    for (int pos = 0; pos < cb.n; ++pos) {
      double u = rng.next_double(), acc = 0.0;
      int zv = ch.z_size - 1;
      for (int cand = 0; cand < ch.z_size; ++cand) {
        acc += ch(cb.xwords[std::size_t(i)][std::size_t(pos)], cb.ywords[std::size_t(j)][std::size_t(pos)],
                  s[std::size_t(pos)], cand);
        if (u < acc) {
          zv = cand;
          break;
        }
      }
      z[std::size_t(pos)] = zv;
    }
    auto res = dec.decode(z);
    errors[t] = std::binary_search(res.list.begin(), res.list.end(), std::make_pair(i + 1, j + 1)) ? 0 : 1;
  });
  long bad = 0;
  for (auto e : errors) bad += e;
  est.trials = trials;
  est.value = double(bad) / double(trials);
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / double(trials));
  return est;
}

// 0 < eps < delta <= R < eta / (2(6L+4))
inline bool params_ok(double eps, double delta, double r, double eta, int L) {
  return 0.0 < eps && eps < delta && delta <= r && r < eta / (2.0 * (6.0 * L + 4.0));
}

}  // namespace avmac::listdecode
