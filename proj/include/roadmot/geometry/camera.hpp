#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "roadmot/errors.hpp"

namespace roadmot {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

// Denominator threshold below which a pixel counts as being on the horizon.
inline constexpr double kHorizonEps = 1e-6;

// Pinhole camera over a planar road, right-handed frame: X right, Y down,
// Z forward. The plane normal n points from the camera toward the road, so
// every road point X in camera coordinates satisfies n.dot(X) == h_cam.
struct CameraRig {
  double fx = 700.0;
  double fy = 700.0;
  double cx = 600.0;
  double cy = 180.0;
  int image_width = 1200;
  int image_height = 360;
  Vec3 n = Vec3(0.0, 1.0, 0.0);
  double h_cam = 1.65;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && image_width > 0 && image_height > 0 &&
           std::abs(n.norm() - 1.0) <= 1e-9 && h_cam > 0.0;
  }

  // K^-1 * (u, v, 1)
  Vec3 ray(const Vec2& pixel) const {
    return Vec3((pixel.x() - cx) / fx, (pixel.y() - cy) / fy, 1.0);
  }

  bool contains(const Vec2& pixel) const {
    return pixel.x() >= 0.0 && pixel.x() <= image_width && pixel.y() >= 0.0 &&
           pixel.y() <= image_height;
  }
};

// Intersects the viewing ray of `pixel` with the road plane:
//   X = h * K^-1 x / (n^T K^-1 x).
// The result satisfies n.dot(X) == h_cam.
inline Vec3 backproject_ground(const Vec2& pixel, const CameraRig& rig) {
  const Vec3 r = rig.ray(pixel);
  const double denom = rig.n.dot(r);
  if (denom <= kHorizonEps) {
    throw DegenerateHorizon("pixel at or above horizon, n.K^-1x = " +
                            std::to_string(denom));
  }
  return (rig.h_cam / denom) * r;
}

inline Vec2 project(const Vec3& point, const CameraRig& rig) {
  if (point.z() <= 0.0) {
    throw BehindCamera("projection of point with Z = " +
                       std::to_string(point.z()));
  }
  return Vec2(rig.fx * point.x() / point.z() + rig.cx,
              rig.fy * point.y() / point.z() + rig.cy);
}

// d(backproject_ground)/d(pixel), a 3x2 matrix in meters per pixel. Maps an
// isotropic pixel covariance sigma^2 I to the 3D covariance J sigma^2 J^T.
inline Mat32 backprojection_jacobian(const Vec2& pixel, const CameraRig& rig) {
  const Vec3 r = rig.ray(pixel);
  const double d = rig.n.dot(r);
  if (d <= kHorizonEps) {
    throw DegenerateHorizon("jacobian at or above horizon, n.K^-1x = " +
                            std::to_string(d));
  }
  const Vec3 x = (rig.h_cam / d) * r;
  const Vec3 ru(1.0 / rig.fx, 0.0, 0.0);
  const Vec3 rv(0.0, 1.0 / rig.fy, 0.0);
  Mat32 j;
  j.col(0) = (rig.h_cam / d) * ru - (rig.n.x() / (rig.fx * d)) * x;
  j.col(1) = (rig.h_cam / d) * rv - (rig.n.y() / (rig.fy * d)) * x;
  return j;
}

}  // namespace roadmot
