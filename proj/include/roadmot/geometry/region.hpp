#pragma once

#include <array>

#include "roadmot/detection.hpp"
#include "roadmot/geometry/camera.hpp"
#include "roadmot/geometry/polygon.hpp"
#include "roadmot/geometry/rigid_motion.hpp"

namespace roadmot {

inline constexpr double kDefaultSigma0 = 4.0;

// Oriented 3D uncertainty box for a backprojected detection: a center on the
// road, per-axis half extents (X lateral, Y vertical, Z depth), and a yaw
// about the vertical axis.
struct GatedRegion3D {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
  double yaw = 0.0;
};

inline std::array<Vec3, 8> region_corners(const GatedRegion3D& region) {
  const Mat3 r = RigidMotion::yaw_matrix(region.yaw);
  std::array<Vec3, 8> corners;
  int k = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        corners[k++] = region.center +
                       r * Vec3(sx * region.half_extents.x(),
                                sy * region.half_extents.y(),
                                sz * region.half_extents.z());
  return corners;
}

// Footprint of the region on the road plane (X/Z axes, meters).
inline ConvexPolygon2D footprint_xz(const GatedRegion3D& region) {
  const double c = std::cos(region.yaw), s = std::sin(region.yaw);
  const double hx = region.half_extents.x(), hz = region.half_extents.z();
  if (hx <= 0.0 || hz <= 0.0) return {};
  std::vector<Vec2> pts;
  for (int sx : {-1, 1})
    for (int sz : {-1, 1})
      pts.emplace_back(region.center.x() + c * sx * hx + s * sz * hz,
                       region.center.z() - s * sx * hx + c * sz * hz);
  return convex_hull(std::move(pts));
}

// Yaw about the vertical axis encoded by an axis-angle rotation vector.
inline double yaw_from_axis_angle(const Vec3& omega) {
  const double angle = omega.norm();
  if (angle < 1e-12) return 0.0;
  const Mat3 r = Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
  return std::atan2(r(0, 2), r(2, 2));
}

// Lifts a detection to a gated 3D region. The bbox bottom-center is pushed
// through the road plane; the pixel uncertainty sigma = sigma0 / max(score,
// 0.1) maps through the backprojection Jacobian to a 3D covariance whose
// 3-sigma extents along the (yaw-oriented) box axes set the base half
// extents, which are then grown by half the target dimensions. The box is
// raised half the target height off the road so it covers the body of the
// vehicle rather than straddling the ground plane.
inline GatedRegion3D build_region(const Detection& det, const CameraRig& rig,
                                  double sigma0 = kDefaultSigma0) {
  GatedRegion3D region;
  const Vec2 anchor = det.bbox.bottom_center();
  region.center = backproject_ground(anchor, rig);

  const double sigma = sigma0 / std::max(det.score, 0.1);
  const Mat32 j = backprojection_jacobian(anchor, rig);
  const Mat3 cov = (sigma * sigma) * (j * j.transpose());

  Dimensions dims;
  if (det.features) {
    dims = det.features->dims;
    region.yaw = yaw_from_axis_angle(det.features->omega);
  }

  const Mat3 axes = RigidMotion::yaw_matrix(region.yaw);
  for (int i = 0; i < 3; ++i) {
    const Vec3 u = axes.col(i);
    region.half_extents[i] = 3.0 * std::sqrt(std::max(0.0, u.dot(cov * u)));
  }
  region.half_extents.x() += 0.5 * dims.width;
  region.half_extents.y() += 0.5 * dims.height;
  region.half_extents.z() += 0.5 * dims.length;
  region.center -= (0.5 * dims.height) * rig.n;
  return region;
}

// Moves a region into the next frame's camera coordinates, growing the half
// extents by the motion's translation uncertainty plus the small-angle
// displacement bound rot_sigma * range.
inline GatedRegion3D transport_region(const GatedRegion3D& region,
                                      const RigidMotion& motion) {
  GatedRegion3D out;
  out.center = apply_motion(motion, region.center);
  out.yaw = wrap_angle(region.yaw + motion.yaw());
  const double inflate =
      motion.trans_sigma + motion.rot_sigma * out.center.norm();
  out.half_extents = region.half_extents + Vec3::Constant(inflate);
  return out;
}

// Projects the region's eight corners and returns their convex hull clipped
// to the image. Corners behind the camera are dropped; if every corner is
// behind, the projection is undefined.
inline ConvexPolygon2D project_region(const GatedRegion3D& region,
                                      const CameraRig& rig) {
  std::vector<Vec2> pts;
  for (const Vec3& corner : region_corners(region)) {
    if (corner.z() > 0.0) pts.push_back(project(corner, rig));
  }
  if (pts.empty()) {
    throw BehindCamera("gated region entirely behind the camera");
  }
  const ConvexPolygon2D hull = convex_hull(std::move(pts));
  const ConvexPolygon2D image =
      rect_polygon(0.0, 0.0, rig.image_width, rig.image_height);
  return clip_convex(hull, image);
}

}  // namespace roadmot
