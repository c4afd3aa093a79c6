#pragma once

#include <vector>

#include "avmac/channel.hpp"
#include "avmac/util.hpp"

namespace testutil {

using avmac::Avmac;
using avmac::Rat;

// z = x ^ y ^ s over binary alphabets
inline Avmac xor_channel() {
  std::vector<Rat> w(16, Rat(0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int s = 0; s < 2; ++s) w[std::size_t((((x * 2 + y) * 2 + s) * 2) + (x ^ y ^ s))] = 1;
  return avmac::validate_channel(std::move(w), 2, 2, 2, 2);
}

// singleton state, z = x & y
inline Avmac and_channel() {
  std::vector<Rat> w(8, Rat(0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) w[std::size_t(((x * 2 + y) * 2) + (x & y))] = 1;
  return avmac::validate_channel(std::move(w), 2, 2, 1, 2);
}

// singleton state, z = x + y in {0,1,2}
inline Avmac adder_channel() {
  std::vector<Rat> w(12, Rat(0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) w[std::size_t(((x * 2 + y) * 3) + (x + y))] = 1;
  return avmac::validate_channel(std::move(w), 2, 2, 1, 3);
}

// S = X x Y (4 states), z = (x ^ x') | (y ^ y') with s = (x', y')
inline Avmac swap_channel() {
  std::vector<Rat> w(32, Rat(0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int xp = 0; xp < 2; ++xp)
        for (int yp = 0; yp < 2; ++yp) {
          int s = xp * 2 + yp;
          int z = ((x ^ xp) | (y ^ yp));
          w[std::size_t((((x * 2 + y) * 4 + s) * 2) + z)] = 1;
        }
  return avmac::validate_channel(std::move(w), 2, 2, 4, 2);
}

// singleton state, |Z| = 4, z = (x, y)
inline Avmac identity_pairs_channel() {
  std::vector<Rat> w(16, Rat(0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) w[std::size_t(((x * 2 + y) * 4) + (x * 2 + y))] = 1;
  return avmac::validate_channel(std::move(w), 2, 2, 1, 4);
}

// S = X, z = x ^ s, y ignored
inline Avmac xs_ignore_y_channel() {
  std::vector<Rat> w(16, Rat(0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int s = 0; s < 2; ++s) w[std::size_t((((x * 2 + y) * 2 + s) * 2) + (x ^ s))] = 1;
  return avmac::validate_channel(std::move(w), 2, 2, 2, 2);
}

inline Avmac random_channel(avmac::Prng& rng, int xs, int ys, int ss, int zs) {
  std::vector<double> w(std::size_t(xs) * ys * ss * zs);
  for (int x = 0; x < xs; ++x)
    for (int y = 0; y < ys; ++y)
      for (int s = 0; s < ss; ++s) {
        double sum = 0.0;
        std::vector<double> row(std::size_t(zs), 0.0);
        for (auto& v : row) {
          v = rng.next_double() + 1e-9;
          sum += v;
        }
        for (int z = 0; z < zs; ++z) w[std::size_t(((x * ys + y) * ss + s) * zs + z)] = row[std::size_t(z)] / sum;
      }
  return avmac::validate_channel(std::move(w), xs, ys, ss, zs);
}

inline std::vector<double> random_simplex(avmac::Prng& rng, int dim) {
  std::vector<double> p(std::size_t(dim), 0.0);
  double sum = 0.0;
  for (auto& v : p) {
    v = rng.next_double() + 1e-9;
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace testutil
