#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "roadmot/geometry/camera.hpp"

namespace roadmot {

// Frame-to-frame rigid transform p' = R p + t plus a conservative scalar
// uncertainty budget for each part (used to inflate gated search regions).
struct RigidMotion {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double trans_sigma = 0.0;
  double rot_sigma = 0.0;

  static RigidMotion identity() { return RigidMotion{}; }

  // Rotation about the vertical (Y-down) axis; +90 deg maps +X to -Z.
  static Mat3 yaw_matrix(double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    Mat3 r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
  }

  static RigidMotion from_yaw(double yaw, const Vec3& t,
                              double trans_sigma = 0.0,
                              double rot_sigma = 0.0) {
    return RigidMotion{yaw_matrix(yaw), t, trans_sigma, rot_sigma};
  }

  // Yaw component of the rotation (heading of the rotated +Z axis).
  double yaw() const { return std::atan2(rotation(0, 2), rotation(2, 2)); }

  bool valid() const {
    return (rotation.transpose() * rotation - Mat3::Identity())
                   .cwiseAbs()
                   .maxCoeff() <= 1e-9 &&
           std::abs(rotation.determinant() - 1.0) <= 1e-9 &&
           trans_sigma >= 0.0 && rot_sigma >= 0.0;
  }
};

inline Vec3 apply_motion(const RigidMotion& motion, const Vec3& point) {
  return motion.rotation * point + motion.translation;
}

// second o first: the motion taking frame-a coordinates to frame-c
// coordinates when `first` maps a->b and `second` maps b->c. Uncertainty
// budgets add (worst case).
inline RigidMotion compose(const RigidMotion& second,
                           const RigidMotion& first) {
  return RigidMotion{second.rotation * first.rotation,
                     second.rotation * first.translation + second.translation,
                     first.trans_sigma + second.trans_sigma,
                     first.rot_sigma + second.rot_sigma};
}

inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

}  // namespace roadmot
