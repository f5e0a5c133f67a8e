#pragma once

#include <vector>

#include "roadmot/detection.hpp"
#include "roadmot/geometry/camera.hpp"

namespace roadmot::sim {

// Linear deformable shape: keypoints = mean_shape + sum_b lambda_b * basis_b.
// Coordinates are object-local, Y down, origin at the ground center, +Z the
// heading direction.
struct ShapeModel {
  std::vector<Vec3> mean_shape;
  std::vector<std::vector<Vec3>> basis;

  int basis_count() const { return int(basis.size()); }
};

inline std::vector<Vec3> reconstruct_shape(const ShapeModel& model,
                                           const Eigen::VectorXd& lambda) {
  if (int(lambda.size()) != model.basis_count()) {
    throw LengthMismatch("lambda length " + std::to_string(lambda.size()) +
                         " vs basis count " +
                         std::to_string(model.basis_count()));
  }
  std::vector<Vec3> shape = model.mean_shape;
  for (int b = 0; b < model.basis_count(); ++b) {
    for (size_t k = 0; k < shape.size(); ++k) {
      shape[k] += lambda[b] * model.basis[b][k];
    }
  }
  return shape;
}

// Canonical 12-keypoint car (wheel centers, head/tail lights, roof corners)
// with a 5-element deformation basis: length, width, height scaling, roof
// shift (sedan vs SUV-ish), and wheelbase stretch.
inline ShapeModel car_shape_model() {
  ShapeModel m;
  const double hw = 0.8, half_wheelbase = 1.3, wheel_y = -0.35;
  const double nose = 2.0, tail = -2.0, light_y = -0.65;
  const double roof_y = -1.45, roof_front = 0.5, roof_back = -1.1;
  m.mean_shape = {
      {-hw, wheel_y, half_wheelbase},  {hw, wheel_y, half_wheelbase},
      {-hw, wheel_y, -half_wheelbase}, {hw, wheel_y, -half_wheelbase},
      {-0.6, light_y, nose},           {0.6, light_y, nose},
      {-0.6, light_y, tail},           {0.6, light_y, tail},
      {-0.7, roof_y, roof_front},      {0.7, roof_y, roof_front},
      {-0.7, roof_y, roof_back},       {0.7, roof_y, roof_back},
  };
  const size_t n = m.mean_shape.size();
  m.basis.assign(5, std::vector<Vec3>(n, Vec3::Zero()));
  for (size_t k = 0; k < n; ++k) {
    const Vec3& p = m.mean_shape[k];
    m.basis[0][k] = Vec3(0, 0, 0.4 * p.z());               // length scale
    m.basis[1][k] = Vec3(0.3 * p.x(), 0, 0);               // width scale
    m.basis[2][k] = Vec3(0, 0.3 * p.y(), 0);               // height scale
    m.basis[3][k] = (p.y() < -1.0) ? Vec3(0, -0.25, 0.3)   // roof shift
                                   : Vec3::Zero();
    m.basis[4][k] = (std::abs(p.y() - wheel_y) < 1e-9)     // wheelbase
                        ? Vec3(0, 0, 0.3 * (p.z() > 0 ? 1.0 : -1.0))
                        : Vec3::Zero();
  }
  return m;
}

// Bounding dimensions of a keypoint cloud, padded a little since keypoints
// sit inside the body shell.
inline Dimensions shape_dimensions(const std::vector<Vec3>& shape) {
  Vec3 lo = shape.front(), hi = shape.front();
  for (const Vec3& p : shape) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Dimensions d;
  d.width = (hi.x() - lo.x()) + 0.1;
  d.height = (0.0 - lo.y()) + 0.05;  // ground plane is y = 0 in object frame
  d.length = (hi.z() - lo.z()) + 0.2;
  return d;
}

}  // namespace roadmot::sim
