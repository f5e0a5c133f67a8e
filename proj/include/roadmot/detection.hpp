#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>

#include "roadmot/geometry/polygon.hpp"

namespace roadmot {

// Axis-aligned image box, top-left origin, pixel units.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return x; }
  double top() const { return y; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  Vec2 bottom_center() const { return Vec2(x + 0.5 * w, y + h); }

  ConvexPolygon2D polygon() const {
    return rect_polygon(x, y, x + w, y + h);
  }
};

inline double intersection_area(const BBox& a, const BBox& b) {
  const double iw =
      std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih =
      std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  return (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
}

inline double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

// Object dimensions in meters.
struct Dimensions {
  double height = 1.5;
  double width = 1.6;
  double length = 4.0;
};

// Per-detection sidecar produced by an upstream single-image shape/pose
// system: appearance descriptor psi, deformation coefficients lambda
// (B = 5 basis shapes), axis-angle pose omega, and metric dimensions.
struct ObjectFeatures {
  Eigen::VectorXd psi;
  Eigen::Matrix<double, 5, 1> lambda = Eigen::Matrix<double, 5, 1>::Zero();
  Vec3 omega = Vec3::Zero();
  Dimensions dims;
};

struct Detection {
  int frame = 0;
  BBox bbox;
  double score = 1.0;
  std::optional<ObjectFeatures> features;
};

}  // namespace roadmot
