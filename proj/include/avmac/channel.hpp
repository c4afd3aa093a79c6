#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avmac/rational.hpp"
#include "avmac/util.hpp"

namespace avmac {

inline constexpr double kRowSumTol = 1e-12;

// Probability vector over a finite alphabet.
struct Dist {
  std::vector<double> p;

  Dist() = default;
  explicit Dist(std::vector<double> values) : p(std::move(values)) {}

  static Dist validated(std::vector<double> values, double tol = kRowSumTol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0.0)
        throw Error(Errc::negative_entry, "distribution entry " + std::to_string(i) + " is negative");
      sum += values[i];
    }
    if (std::fabs(sum - 1.0) > tol)
      throw Error(Errc::row_sum_mismatch, "distribution sums to " + fmt_g9(sum));
    return Dist(std::move(values));
  }

  static Dist uniform(int n) { return Dist(std::vector<double>(n, 1.0 / n)); }

  static Dist point_mass(int n, int at) {
    std::vector<double> v(n, 0.0);
    v.at(at) = 1.0;
    return Dist(std::move(v));
  }

  int size() const { return int(p.size()); }
  double operator[](int i) const { return p[i]; }
};

// State-averaged single-letter channel, kernel indexed (x, y, z).
struct AveragedMac {
  int x_size = 0, y_size = 0, z_size = 0;
  std::vector<double> w;

  double operator()(int x, int y, int z) const {
    return w[std::size_t((x * y_size + y) * z_size + z)];
  }
};

// Discrete memoryless AVMAC. Kernel index order is (x, y, s, z) everywhere.
// Immutable after validation; all member functions are const.
struct Avmac {
  int x_size = 0, y_size = 0, s_size = 0, z_size = 0;
  std::array<std::vector<std::string>, 4> labels;  // x, y, s, z
  std::vector<double> w;
  std::vector<Rat> w_exact;  // empty unless every entry was given as a rational

  bool exact() const { return !w_exact.empty(); }

  std::size_t index(int x, int y, int s, int z) const {
    return std::size_t(((x * y_size + y) * s_size + s) * z_size + z);
  }
  double operator()(int x, int y, int s, int z) const { return w[index(x, y, s, z)]; }
  const Rat& exact_at(int x, int y, int s, int z) const { return w_exact[index(x, y, s, z)]; }

  std::size_t kernel_size() const {
    return std::size_t(x_size) * y_size * s_size * z_size;
  }

  const std::string& label(int axis, int symbol) const { return labels[std::size_t(axis)][std::size_t(symbol)]; }
};

namespace detail {

inline std::array<std::vector<std::string>, 4> default_labels(int xs, int ys, int ss, int zs) {
  std::array<std::vector<std::string>, 4> out;
  const int sizes[4] = {xs, ys, ss, zs};
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < sizes[a]; ++i) out[std::size_t(a)].push_back(std::to_string(i));
  return out;
}

inline void check_sizes(int xs, int ys, int ss, int zs, std::size_t n_entries) {
  if (xs < 1 || ys < 1 || ss < 1 || zs < 1)
    throw Error(Errc::dimension_mismatch, "alphabet sizes must be >= 1");
  std::size_t expect = std::size_t(xs) * ys * ss * zs;
  if (n_entries != expect)
    throw Error(Errc::dimension_mismatch,
                "kernel has " + std::to_string(n_entries) + " entries, expected " + std::to_string(expect));
}

inline std::string row_name(const Avmac& ch, int x, int y, int s) {
  return "(x=" + ch.label(0, x) + ", y=" + ch.label(1, y) + ", s=" + ch.label(2, s) + ")";
}

}  // namespace detail

inline Avmac validate_channel(std::vector<double> raw, int x_size, int y_size, int s_size, int z_size,
                              std::array<std::vector<std::string>, 4> labels = {}) {
  detail::check_sizes(x_size, y_size, s_size, z_size, raw.size());
  Avmac ch;
  ch.x_size = x_size;
  ch.y_size = y_size;
  ch.s_size = s_size;
  ch.z_size = z_size;
  ch.labels = labels[0].empty() ? detail::default_labels(x_size, y_size, s_size, z_size) : std::move(labels);
  ch.w = std::move(raw);
  for (int x = 0; x < x_size; ++x)
    for (int y = 0; y < y_size; ++y)
      for (int s = 0; s < s_size; ++s) {
        double sum = 0.0;
        for (int z = 0; z < z_size; ++z) {
          double v = ch(x, y, s, z);
          if (v < 0.0)
            throw Error(Errc::negative_entry, "W(z|" + detail::row_name(ch, x, y, s) + ") has a negative entry");
          sum += v;
        }
        if (std::fabs(sum - 1.0) > kRowSumTol)
          throw Error(Errc::row_sum_mismatch,
                      "row " + detail::row_name(ch, x, y, s) + " sums to " + fmt_g9(sum));
      }
  return ch;
}

// Exact-rational kernels must have rows summing to exactly 1.
inline Avmac validate_channel(std::vector<Rat> raw, int x_size, int y_size, int s_size, int z_size,
                              std::array<std::vector<std::string>, 4> labels = {}) {
  detail::check_sizes(x_size, y_size, s_size, z_size, raw.size());
  std::vector<double> flt(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) flt[i] = to_double(raw[i]);
  Avmac ch = validate_channel(std::move(flt), x_size, y_size, s_size, z_size, std::move(labels));
  for (int x = 0; x < x_size; ++x)
    for (int y = 0; y < y_size; ++y)
      for (int s = 0; s < s_size; ++s) {
        Rat sum = 0;
        for (int z = 0; z < z_size; ++z) {
          const Rat& v = raw[ch.index(x, y, s, z)];
          if (v < 0)
            throw Error(Errc::negative_entry, "W(z|" + detail::row_name(ch, x, y, s) + ") has a negative entry");
          sum += v;
        }
        if (sum != 1)
          throw Error(Errc::row_sum_mismatch,
                      "row " + detail::row_name(ch, x, y, s) + " sums to " + format_rational(sum));
      }
  ch.w_exact = std::move(raw);
  return ch;
}

inline AveragedMac average_under_state(const Avmac& ch, const Dist& q) {
  if (q.size() != ch.s_size)
    throw Error(Errc::dimension_mismatch,
                "state distribution has " + std::to_string(q.size()) + " entries, |S| = " + std::to_string(ch.s_size));
  AveragedMac out;
  out.x_size = ch.x_size;
  out.y_size = ch.y_size;
  out.z_size = ch.z_size;
  out.w.assign(std::size_t(ch.x_size) * ch.y_size * ch.z_size, 0.0);
  for (int x = 0; x < ch.x_size; ++x)
    for (int y = 0; y < ch.y_size; ++y)
      for (int s = 0; s < ch.s_size; ++s) {
        double qs = q[s];
        if (qs == 0.0) continue;
        for (int z = 0; z < ch.z_size; ++z)
          out.w[std::size_t((x * out.y_size + y) * out.z_size + z)] += qs * ch(x, y, s, z);
      }
  return out;
}

inline double nfold_prob(const Avmac& ch, const std::vector<int>& xseq, const std::vector<int>& yseq,
                         const std::vector<int>& sseq, const std::vector<int>& zseq) {
  std::size_t n = xseq.size();
  if (yseq.size() != n || sseq.size() != n || zseq.size() != n)
    throw Error(Errc::length_mismatch, "sequence lengths differ");
  double p = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    int x = xseq[i], y = yseq[i], s = sseq[i], z = zseq[i];
    if (x < 0 || x >= ch.x_size || y < 0 || y >= ch.y_size || s < 0 || s >= ch.s_size || z < 0 || z >= ch.z_size)
      throw Error(Errc::symbol_out_of_range, "symbol out of range at position " + std::to_string(i));
    p *= ch(x, y, s, z);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Channel file format: JSON object with "x","y","s","z" label arrays and "w",
// a 4-level nested array indexed [x][y][s][z]. Entries are numbers or "p/q"
// strings; all-rational files round-trip bit-exactly.

inline Avmac parse_channel(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  const char* axes[4] = {"x", "y", "s", "z"};
  std::array<std::vector<std::string>, 4> labels;
  for (int a = 0; a < 4; ++a) {
    if (!j.contains(axes[a]) || !j[axes[a]].is_array() || j[axes[a]].empty())
      throw Error(Errc::parse_error, std::string("missing or empty alphabet array \"") + axes[a] + "\"");
    for (const auto& v : j[axes[a]]) labels[std::size_t(a)].push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  int xs = int(labels[0].size()), ys = int(labels[1].size()), ss = int(labels[2].size()), zs = int(labels[3].size());
  if (!j.contains("w")) throw Error(Errc::parse_error, "missing kernel \"w\"");

  std::vector<Rat> exact;
  std::vector<double> flt;
  exact.reserve(std::size_t(xs) * ys * ss * zs);
  flt.reserve(exact.capacity());
  bool all_exact = true;

  const auto& w = j["w"];
  auto level_err = [&](const char* what, int x, int y, int s) {
    return Error(Errc::dimension_mismatch, std::string(what) + " at w[" + std::to_string(x) + "][" +
                                               std::to_string(y) + "][" + std::to_string(s) + "]");
  };
  if (!w.is_array() || int(w.size()) != xs)
    throw Error(Errc::dimension_mismatch, "w must have " + std::to_string(xs) + " x-slices");
  for (int x = 0; x < xs; ++x) {
    if (!w[x].is_array() || int(w[x].size()) != ys) throw level_err("bad y dimension", x, -1, -1);
    for (int y = 0; y < ys; ++y) {
      if (!w[x][y].is_array() || int(w[x][y].size()) != ss) throw level_err("bad s dimension", x, y, -1);
      for (int s = 0; s < ss; ++s) {
        const auto& row = w[x][y][s];
        if (!row.is_array() || int(row.size()) != zs) throw level_err("bad z dimension", x, y, s);
        for (int z = 0; z < zs; ++z) {
          const auto& cell = row[z];
          if (cell.is_string()) {
            Rat r = parse_rational(cell.get<std::string>());
            exact.push_back(r);
            flt.push_back(to_double(r));
          } else if (cell.is_number_integer()) {
            Rat r(cell.get<long long>());
            exact.push_back(r);
            flt.push_back(to_double(r));
          } else if (cell.is_number()) {
            all_exact = false;
            flt.push_back(cell.get<double>());
          } else {
            throw Error(Errc::parse_error, "kernel entry at z=" + std::to_string(z) + " is not a number or \"p/q\"");
          }
        }
      }
    }
  }
  if (all_exact) return validate_channel(std::move(exact), xs, ys, ss, zs, std::move(labels));
  return validate_channel(std::move(flt), xs, ys, ss, zs, std::move(labels));
}

inline std::string serialize_channel(const Avmac& ch) {
  nlohmann::json j;
  const char* axes[4] = {"x", "y", "s", "z"};
  for (int a = 0; a < 4; ++a) j[axes[a]] = ch.labels[std::size_t(a)];
  nlohmann::json w = nlohmann::json::array();
  for (int x = 0; x < ch.x_size; ++x) {
    nlohmann::json jx = nlohmann::json::array();
    for (int y = 0; y < ch.y_size; ++y) {
      nlohmann::json jy = nlohmann::json::array();
      for (int s = 0; s < ch.s_size; ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int z = 0; z < ch.z_size; ++z) {
          if (ch.exact())
            row.push_back(format_rational(ch.exact_at(x, y, s, z)));
          else
            row.push_back(ch(x, y, s, z));
        }
        jy.push_back(std::move(row));
      }
      jx.push_back(std::move(jy));
    }
    w.push_back(std::move(jx));
  }
  j["w"] = std::move(w);
  return j.dump(2) + "\n";
}

inline bool operator==(const Avmac& a, const Avmac& b) {
  if (a.x_size != b.x_size || a.y_size != b.y_size || a.s_size != b.s_size || a.z_size != b.z_size) return false;
  if (a.labels != b.labels) return false;
  if (a.exact() != b.exact()) return false;
  if (a.exact()) return a.w_exact == b.w_exact;
  return a.w == b.w;
}

}  // namespace avmac
