#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "avmac/channel.hpp"
#include "avmac/polygon.hpp"
#include "avmac/util.hpp"

namespace avmac::capacity {

enum class MiSelect { x_given_y, y_given_x, xy };

namespace detail {

inline constexpr double kQFloor = 1e-12;

struct MiWork {
  const Avmac* ch;
  const Dist* px;
  const Dist* py;
  MiSelect which;
  std::vector<double> v;  // V_q(z | x, y)

  void averaged(const std::vector<double>& q) {
    int X = ch->x_size, Y = ch->y_size, S = ch->s_size, Z = ch->z_size;
    v.assign(std::size_t(X) * Y * Z, 0.0);
    for (int x = 0; x < X; ++x)
      for (int y = 0; y < Y; ++y)
        for (int s = 0; s < S; ++s) {
          double qs = q[std::size_t(s)];
          if (qs == 0.0) continue;
          for (int z = 0; z < Z; ++z)
            v[std::size_t((x * Y + y) * Z + z)] += qs * (*ch)(x, y, s, z);
        }
  }

  // mutual information in bits at the current averaged kernel
  double objective() const {
    int X = ch->x_size, Y = ch->y_size, Z = ch->z_size;
    std::vector<double> denom = denominator();
    double mi = 0.0;
    for (int x = 0; x < X; ++x) {
      double pxv = (*px)[x];
      if (pxv == 0.0) continue;
      for (int y = 0; y < Y; ++y) {
        double pyv = (*py)[y];
        if (pyv == 0.0) continue;
        for (int z = 0; z < Z; ++z) {
          double vz = v[std::size_t((x * Y + y) * Z + z)];
          if (vz <= 0.0) continue;
          mi += pxv * pyv * vz * std::log2(vz / denom_at(denom, x, y, z));
        }
      }
    }
    return mi < 0.0 ? 0.0 : mi;
  }

  // d objective / d q(s) = sum_cells Px Py W_s log2(V / denom); the entropy
  // normalization terms cancel because rows of W and V both sum to one.
  std::vector<double> gradient() const {
    int X = ch->x_size, Y = ch->y_size, S = ch->s_size, Z = ch->z_size;
    std::vector<double> denom = denominator();
    std::vector<double> g(std::size_t(S), 0.0);
    for (int x = 0; x < X; ++x) {
      double pxv = (*px)[x];
      if (pxv == 0.0) continue;
      for (int y = 0; y < Y; ++y) {
        double pyv = (*py)[y];
        if (pyv == 0.0) continue;
        for (int z = 0; z < Z; ++z) {
          double vz = v[std::size_t((x * Y + y) * Z + z)];
          if (vz <= 0.0) continue;  // then W(z|x,y,s) = 0 for every s at interior q
          double lg = std::log2(vz / denom_at(denom, x, y, z));
          for (int s = 0; s < S; ++s) {
            double w = (*ch)(x, y, s, z);
            if (w > 0.0) g[std::size_t(s)] += pxv * pyv * w * lg;
          }
        }
      }
    }
    return g;
  }

 private:
  // conditioning marginal: Q(z), V(z|y) or V(z|x) depending on the selection
  std::vector<double> denominator() const {
    int X = ch->x_size, Y = ch->y_size, Z = ch->z_size;
    std::vector<double> d;
    switch (which) {
      case MiSelect::xy: {
        d.assign(std::size_t(Z), 0.0);
        for (int x = 0; x < X; ++x)
          for (int y = 0; y < Y; ++y) {
            double pp = (*px)[x] * (*py)[y];
            if (pp == 0.0) continue;
            for (int z = 0; z < Z; ++z) d[std::size_t(z)] += pp * v[std::size_t((x * Y + y) * Z + z)];
          }
        break;
      }
      case MiSelect::x_given_y: {
        d.assign(std::size_t(Y) * Z, 0.0);
        for (int x = 0; x < X; ++x) {
          double pxv = (*px)[x];
          if (pxv == 0.0) continue;
          for (int y = 0; y < Y; ++y)
            for (int z = 0; z < Z; ++z)
              d[std::size_t(y * Z + z)] += pxv * v[std::size_t((x * Y + y) * Z + z)];
        }
        break;
      }
      case MiSelect::y_given_x: {
        d.assign(std::size_t(X) * Z, 0.0);
        for (int y = 0; y < Y; ++y) {
          double pyv = (*py)[y];
          if (pyv == 0.0) continue;
          for (int x = 0; x < X; ++x)
            for (int z = 0; z < Z; ++z)
              d[std::size_t(x * Z + z)] += pyv * v[std::size_t((x * Y + y) * Z + z)];
        }
        break;
      }
    }
    return d;
  }

  double denom_at(const std::vector<double>& d, int x, int y, int z) const {
    switch (which) {
      case MiSelect::xy: return d[std::size_t(z)];
      case MiSelect::x_given_y: return d[std::size_t(y * ch->z_size + z)];
      case MiSelect::y_given_x: return d[std::size_t(x * ch->z_size + z)];
    }
    return 0.0;
  }
};

inline void floor_and_renormalize(std::vector<double>& q) {
  double sum = 0.0;
  for (double& v : q) {
    if (v < kQFloor) v = kQFloor;
    sum += v;
  }
  for (double& v : q) v /= sum;
}

inline double golden_section(const std::function<double(double)>& f, double lo, double hi, int iters = 60) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

struct MinMiResult {
  double value = 0.0;
  Dist argmin;
  double gap = 0.0;  // certified bound on value - infimum
  bool converged = false;
  long iterations = 0;
};

// Minimize the selected mutual information over state distributions. The
// objective is convex in q for fixed product inputs, so the Frank-Wolfe gap
// at the final iterate certifies the tolerance; away steps keep the descent
// fast on these small simplexes.
inline MinMiResult min_state_mi(const Avmac& ch, const Dist& px, const Dist& py, MiSelect which, double tol,
                                long max_iter = 20000) {
  if (px.size() != ch.x_size || py.size() != ch.y_size)
    throw Error(Errc::dimension_mismatch, "input distribution sizes do not match the channel");
  if (tol <= 0.0) throw Error(Errc::bad_argument, "tol must be positive");
  const int S = ch.s_size;

  detail::MiWork work{&ch, &px, &py, which, {}};
  std::vector<double> q(std::size_t(S), 1.0 / S);

  MinMiResult res;
  for (long it = 0; it < max_iter; ++it) {
    res.iterations = it;
    work.averaged(q);
    double f = work.objective();
    auto g = work.gradient();

    double qg = 0.0;
    for (int s = 0; s < S; ++s) qg += q[std::size_t(s)] * g[std::size_t(s)];
    int s_fw = 0, s_away = 0;
    for (int s = 1; s < S; ++s) {
      if (g[std::size_t(s)] < g[std::size_t(s_fw)]) s_fw = s;
      if (q[std::size_t(s)] > 2 * detail::kQFloor && g[std::size_t(s)] > g[std::size_t(s_away)]) s_away = s;
    }
    double gap_fw = qg - g[std::size_t(s_fw)];
    double gap_away = g[std::size_t(s_away)] - qg;

    res.value = f;
    res.gap = std::max(gap_fw, 0.0);
    if (gap_fw <= tol) {
      res.converged = true;
      break;
    }

    bool use_fw = gap_fw >= gap_away;
    double theta_max = 1.0;
    std::vector<double> dir(std::size_t(S), 0);
    if (use_fw) {
      for (int s = 0; s < S; ++s) dir[std::size_t(s)] = (s == s_fw ? 1.0 : 0.0) - q[std::size_t(s)];
    } else {
      double qa = q[std::size_t(s_away)];
      theta_max = std::min(qa / std::max(1.0 - qa, 1e-12), 1e6);
      for (int s = 0; s < S; ++s) dir[std::size_t(s)] = q[std::size_t(s)] - (s == s_away ? 1.0 : 0.0);
    }

    detail::MiWork probe = work;
    auto at = [&](double th) {
      std::vector<double> qq(std::size_t(S), 0);
      for (int s = 0; s < S; ++s) qq[std::size_t(s)] = q[std::size_t(s)] + th * dir[std::size_t(s)];
      detail::floor_and_renormalize(qq);
      probe.averaged(qq);
      return probe.objective();
    };
    double theta = detail::golden_section(at, 0.0, theta_max);
    if (at(theta) > f) theta = 0.0;  // keep the iterate if the search failed to improve
    if (theta == 0.0 && use_fw) theta = std::min(1e-3, theta_max);  // nudge off a stall
    for (int s = 0; s < S; ++s) q[std::size_t(s)] += theta * dir[std::size_t(s)];
    detail::floor_and_renormalize(q);
  }
  res.argmin = Dist(q);
  if (!res.converged) {
    work.averaged(q);
    res.value = work.objective();
  }
  return res;
}

struct Pentagon {
  double r1_max = 0.0, r2_max = 0.0, rsum_max = 0.0;
  Dist px, py;
  Dist q_r1, q_r2, q_rsum;  // minimizing state distributions per bound
  bool converged = true;
};

inline Pentagon pentagon(const Avmac& ch, const Dist& px, const Dist& py, double tol) {
  Pentagon p;
  p.px = px;
  p.py = py;
  auto r1 = min_state_mi(ch, px, py, MiSelect::x_given_y, tol);
  auto r2 = min_state_mi(ch, px, py, MiSelect::y_given_x, tol);
  auto rs = min_state_mi(ch, px, py, MiSelect::xy, tol);
  p.r1_max = r1.value;
  p.r2_max = r2.value;
  p.rsum_max = rs.value;
  p.q_r1 = r1.argmin;
  p.q_r2 = r2.argmin;
  p.q_rsum = rs.argmin;
  p.converged = r1.converged && r2.converged && rs.converged;
  return p;
}

struct RateRegion {
  std::vector<geom::Pt> vertices;  // CCW from (0,0)
  int grid_k = 0;
  bool inner_approximation = true;
};

struct RegionReport {
  RateRegion region;
  std::vector<Pentagon> pentagons;
};

inline std::vector<geom::Pt> pentagon_polygon(const Pentagon& p) {
  double big = p.r1_max + p.r2_max + 1.0;
  std::vector<geom::Pt> poly = {{0, 0}, {big, 0}, {big, big}, {0, big}};
  poly = geom::clip_halfplane(poly, 1, 0, p.r1_max);
  poly = geom::clip_halfplane(poly, 0, 1, p.r2_max);
  poly = geom::clip_halfplane(poly, 1, 1, p.rsum_max);
  return poly;
}

// All simplex grid points with denominator grid_k, each axis of `dim` bins.
inline std::vector<Dist> simplex_grid(int dim, int grid_k) {
  std::vector<Dist> out;
  for_each_composition(grid_k, dim, [&](const std::vector<int>& c) {
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = double(c[i]) / grid_k;
    out.push_back(Dist(std::move(p)));
  });
  return out;
}

inline RegionReport random_code_region(const Avmac& ch, int grid_k, double tol) {
  if (grid_k < 1) throw Error(Errc::bad_argument, "grid_k must be >= 1");
  auto gx = simplex_grid(ch.x_size, grid_k);
  auto gy = simplex_grid(ch.y_size, grid_k);

  RegionReport rep;
  rep.pentagons.resize(gx.size() * gy.size());
  parallel_for(rep.pentagons.size(), [&](std::size_t i) {
    rep.pentagons[i] = pentagon(ch, gx[i / gy.size()], gy[i % gy.size()], tol);
  });

  std::vector<geom::Pt> pts = {{0, 0}};
  for (const auto& p : rep.pentagons)
    for (const auto& v : pentagon_polygon(p)) pts.push_back(v);
  auto hull = geom::convex_hull(pts);

  // rotate so the vertex list starts at (0,0)
  std::size_t start = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (std::fabs(hull[i].x) + std::fabs(hull[i].y) <
        std::fabs(hull[start].x) + std::fabs(hull[start].y))
      start = i;
  }
  std::rotate(hull.begin(), hull.begin() + long(start), hull.end());

  rep.region.vertices = std::move(hull);
  rep.region.grid_k = grid_k;
  return rep;
}

inline bool region_contains(const RateRegion& region, double r1, double r2, double slack) {
  return geom::polygon_distance(region.vertices, {r1, r2}) <= slack;
}

}  // namespace avmac::capacity
