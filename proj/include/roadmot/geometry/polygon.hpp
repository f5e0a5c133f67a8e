#pragma once

#include <algorithm>
#include <vector>

#include "roadmot/geometry/camera.hpp"

namespace roadmot {

// Convex polygon with vertices in counterclockwise order (positive signed
// area). Fewer than 3 vertices denotes a degenerate (zero-area) polygon.
struct ConvexPolygon2D {
  std::vector<Vec2> vertices;

  bool degenerate() const { return vertices.size() < 3; }

  double area() const {
    if (degenerate()) return 0.0;
    double twice = 0.0;
    for (size_t i = 0; i < vertices.size(); ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % vertices.size()];
      twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * std::abs(twice);
  }
};

inline double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain; output is CCW with collinear points dropped.
inline ConvexPolygon2D convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  const size_t n = pts.size();
  if (n <= 2) return ConvexPolygon2D{std::move(pts)};
  std::vector<Vec2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return ConvexPolygon2D{std::move(hull)};
}

inline ConvexPolygon2D rect_polygon(double x0, double y0, double x1,
                                    double y1) {
  if (x1 <= x0 || y1 <= y0) return {};
  return ConvexPolygon2D{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

// Sutherland-Hodgman clip of `subject` against a convex CCW `clip` polygon.
inline ConvexPolygon2D clip_convex(const ConvexPolygon2D& subject,
                                   const ConvexPolygon2D& clip) {
  if (clip.degenerate()) return {};
  std::vector<Vec2> out = subject.vertices;
  const size_t m = clip.vertices.size();
  for (size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2& ca = clip.vertices[e];
    const Vec2& cb = clip.vertices[(e + 1) % m];
    std::vector<Vec2> in;
    in.swap(out);
    if (subject.degenerate()) {
      // Point or segment: keep vertices on the inner side of every edge.
      for (const Vec2& p : in) {
        if (cross2(ca, cb, p) >= 0) out.push_back(p);
      }
      continue;
    }
    for (size_t i = 0; i < in.size(); ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % in.size()];
      const double dp = cross2(ca, cb, p);
      const double dq = cross2(ca, cb, q);
      if (dp >= 0) out.push_back(p);
      if ((dp > 0 && dq < 0) || (dp < 0 && dq > 0)) {
        const double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return ConvexPolygon2D{std::move(out)};
}

struct Overlap {
  double intersection = 0.0;
  double area_a = 0.0;
  double area_b = 0.0;
};

// Intersection and input areas of two convex polygons. The intersection is
// clamped so it never exceeds either input area.
inline Overlap polygon_overlap(const ConvexPolygon2D& a,
                               const ConvexPolygon2D& b) {
  Overlap ov;
  ov.area_a = a.area();
  ov.area_b = b.area();
  if (a.degenerate() || b.degenerate()) return ov;
  ov.intersection =
      std::min(clip_convex(a, b).area(), std::min(ov.area_a, ov.area_b));
  return ov;
}

}  // namespace roadmot
