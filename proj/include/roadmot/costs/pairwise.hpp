#pragma once

#include <limits>

#include "roadmot/detection.hpp"
#include "roadmot/geometry/region.hpp"

namespace roadmot {

// Sentinel for pairs pruned by gating or with no computable cost.
inline constexpr double kGated = std::numeric_limits<double>::infinity();

inline bool is_gated(double v) { return !(v < kGated); }

// 3D-2D cost: one minus the fraction of the candidate box covered by the
// projected search region. The region must already be transported into the
// candidate's frame.
inline double cost_3d2d(const GatedRegion3D& region_at_fprime,
                        const Detection& cand, const CameraRig& rig) {
  ConvexPolygon2D gate;
  try {
    gate = project_region(region_at_fprime, rig);
  } catch (const BehindCamera&) {
    return kGated;
  }
  const double box_area = cand.bbox.area();
  if (box_area <= 0.0) return kGated;
  const Overlap ov = polygon_overlap(gate, cand.bbox.polygon());
  return 1.0 - ov.intersection / box_area;
}

// 3D-3D cost: one minus the IoU of the two road-plane footprints.
inline double cost_3d3d(const GatedRegion3D& region_at_fprime,
                        const GatedRegion3D& cand_region) {
  const Overlap ov = polygon_overlap(footprint_xz(region_at_fprime),
                                     footprint_xz(cand_region));
  const double uni = ov.area_a + ov.area_b - ov.intersection;
  if (uni <= 0.0) return kGated;
  return 1.0 - ov.intersection / uni;
}

// Appearance cost: eta_app * ||psi_a - psi_b||^2, clamped to [0, 1].
inline double cost_appearance(const ObjectFeatures& a, const ObjectFeatures& b,
                              double eta_app) {
  if (a.psi.size() == 0 || b.psi.size() == 0) {
    throw MissingFeatures("appearance cost without descriptors");
  }
  if (a.psi.size() != b.psi.size()) {
    throw DimensionMismatch("descriptor lengths " +
                            std::to_string(a.psi.size()) + " vs " +
                            std::to_string(b.psi.size()));
  }
  return std::clamp(eta_app * (a.psi - b.psi).squaredNorm(), 0.0, 1.0);
}

// Shape/pose cost: eta_s * ||lambda_a - lambda_b||^2 +
// eta_p * ||omega_a - omega_b||^2, clamped to [0, 1].
inline double cost_shape_pose(const ObjectFeatures& a, const ObjectFeatures& b,
                              double eta_s, double eta_p) {
  return std::clamp(eta_s * (a.lambda - b.lambda).squaredNorm() +
                        eta_p * (a.omega - b.omega).squaredNorm(),
                    0.0, 1.0);
}

}  // namespace roadmot
