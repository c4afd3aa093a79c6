#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace avmac::geom {

struct Pt {
  double x = 0.0, y = 0.0;
};

inline double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// clip a convex polygon by the half-plane a*x + b*y <= c (Sutherland-Hodgman)
inline std::vector<Pt> clip_halfplane(const std::vector<Pt>& poly, double a, double b, double c) {
  std::vector<Pt> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % n];
    double fp = a * p.x + b * p.y - c;
    double fq = a * q.x + b * q.y - c;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

// counterclockwise convex hull (monotone chain), collinear points dropped
inline std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0.0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;  // CCW, no repeated first point
}

inline double segment_distance(const Pt& a, const Pt& b, const Pt& p) {
  double dx = b.x - a.x, dy = b.y - a.y;
  double len2 = dx * dx + dy * dy;
  double t = len2 == 0.0 ? 0.0 : std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

// Euclidean distance from p to a convex polygon (0 when inside); the polygon
// may be degenerate (point or segment).
inline double polygon_distance(const std::vector<Pt>& poly, const Pt& p) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) {
    double dx = poly[0].x - p.x, dy = poly[0].y - p.y;
    return std::sqrt(dx * dx + dy * dy);
  }
  if (poly.size() == 2) return segment_distance(poly[0], poly[1], p);
  bool inside = true;
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (cross(poly[i], poly[(i + 1) % poly.size()], p) < 0.0) {
      inside = false;
      break;
    }
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    best = std::min(best, segment_distance(poly[i], poly[(i + 1) % poly.size()], p));
  return best;
}

}  // namespace avmac::geom
