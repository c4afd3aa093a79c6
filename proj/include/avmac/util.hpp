#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace avmac {

enum class Errc {
  negative_entry,
  row_sum_mismatch,
  dimension_mismatch,
  length_mismatch,
  symbol_out_of_range,
  shape_mismatch,
  problem_too_large,
  solver_failure,
  type_not_integral,
  not_enough_sequences,
  state_space_too_large,
  budget_exceeded,
  parse_error,
  io_error,
  bad_argument,
  not_applicable,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::negative_entry: return "NegativeEntry";
    case Errc::row_sum_mismatch: return "RowSumMismatch";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::symbol_out_of_range: return "SymbolOutOfRange";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::problem_too_large: return "ProblemTooLarge";
    case Errc::solver_failure: return "SolverFailure";
    case Errc::type_not_integral: return "TypeNotIntegral";
    case Errc::not_enough_sequences: return "NotEnoughSequences";
    case Errc::state_space_too_large: return "StateSpaceTooLarge";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    case Errc::bad_argument: return "BadArgument";
    case Errc::not_applicable: return "NotApplicable";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Deterministic PRNG. splitmix64 is portable across platforms and standard
// library versions, unlike std::uniform_* distributions.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {
    // decorrelate nearby seeds
    for (int i = 0; i < 4; ++i) splitmix64(state_);
  }
  Prng(std::uint64_t seed, std::uint64_t stream)
      : Prng(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0,1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in {0,...,n-1}, rejection sampling to avoid modulo bias
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw Error(Errc::bad_argument, "next_below(0)");
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int next_int(int n) { return int(next_below(std::uint64_t(n))); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[next_below(i)]);
  }

  // index of a cell drawn from a discrete distribution given as doubles
  int sample(const std::vector<double>& probs) {
    double u = next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return int(i);
    }
    return int(probs.size()) - 1;
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Hashing for report provenance fields.

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string content_hash(const std::string& bytes) {
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

// ---------------------------------------------------------------------------
// Numeric formatting: reports print floating point with 9 significant digits.

inline std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// nearest double to the 9-significant-digit decimal rendering
inline double round9(double v) {
  return std::strtod(fmt_g9(v).c_str(), nullptr);
}

// ---------------------------------------------------------------------------
// Parallel work items with deterministic, index-ordered merges. Thread count
// is capped by the AVMAC_THREADS environment variable.

inline unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AVMAC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return std::min<unsigned>(unsigned(v), 256u);
  }
  return hw;
}

// fn(i) must be independent of fn(j); results land in caller-owned slots.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned threads = std::min<std::size_t>(thread_cap(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::vector<std::exception_ptr> errs(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Small combinatorics shared by several modules.

inline unsigned long long binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    unsigned long long num = n - k + i;
    // overflow guard: saturate rather than wrap
    if (r > ~0ULL / num) return ~0ULL;
    r = r * num / i;
  }
  return r;
}

// number of distinct arrangements of a multiset with the given letter counts
inline unsigned long long multinomial(const std::vector<int>& counts) {
  unsigned long long r = 1;
  unsigned n = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      ++n;
      unsigned long long num = n;
      if (r > ~0ULL / num) return ~0ULL;
      r = r * num / i;
    }
  }
  return r;
}

// all vectors of `parts` nonnegative ints summing to `total`, lexicographic
inline void for_each_composition(int total, int parts, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> cur(parts, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      cur[pos] = left;
      fn(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  if (parts <= 0) return;
  rec(0, total);
}

// all k-subsets of {0,...,n-1} in lexicographic order
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace avmac
