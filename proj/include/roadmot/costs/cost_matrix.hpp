#pragma once

#include <optional>
#include <span>
#include <vector>

#include "roadmot/costs/pairwise.hpp"

namespace roadmot {

// Combination weights and normalization constants for the pairwise costs.
// Weights must be non-negative and sum to 1; entries whose cue is missing on
// a pair are dropped and the rest renormalized.
struct CostWeights {
  double w_3d2d = 0.35;
  double w_3d3d = 0.35;
  double w_app = 0.2;
  double w_shape = 0.1;
  double eta_app = 0.1;
  double eta_s = 0.25;
  double eta_p = 0.2;
  double gate_cost = 0.9;

  bool valid() const {
    const double sum = w_3d2d + w_3d3d + w_app + w_shape;
    return w_3d2d >= 0 && w_3d3d >= 0 && w_app >= 0 && w_shape >= 0 &&
           std::abs(sum - 1.0) <= 1e-9 && eta_app > 0 && eta_s > 0 &&
           eta_p > 0 && gate_cost > 0 && gate_cost <= 1.0;
  }

  static CostWeights normalized(double a, double b, double c, double d) {
    CostWeights w;
    const double sum = a + b + c + d;
    w.w_3d2d = a / sum;
    w.w_3d3d = b / sum;
    w.w_app = c / sum;
    w.w_shape = d / sum;
    return w;
  }
};

// Row-major rectangular matrix of combined pairwise costs. Pruned pairs hold
// the kGated sentinel; evaluated_count records how many entries actually had
// their costs computed (the quantity the gating is meant to keep small).
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  int evaluated_count = 0;

  static CostMatrix gated(int rows, int cols) {
    return CostMatrix{rows, cols,
                      std::vector<double>(size_t(rows) * cols, kGated), 0};
  }

  double& at(int r, int c) { return values[size_t(r) * cols + c]; }
  double at(int r, int c) const { return values[size_t(r) * cols + c]; }
};

struct ComponentCosts {
  std::optional<double> c3d2d;
  std::optional<double> c3d3d;
  std::optional<double> app;
  std::optional<double> shape;
};

// Weighted combination over the available components, renormalized by the
// weight mass actually present. Empty when no weighted component remains.
inline std::optional<double> combine_costs(const CostWeights& w,
                                           const ComponentCosts& c) {
  double acc = 0.0, mass = 0.0;
  if (c.c3d2d) { acc += w.w_3d2d * *c.c3d2d; mass += w.w_3d2d; }
  if (c.c3d3d) { acc += w.w_3d3d * *c.c3d3d; mass += w.w_3d3d; }
  if (c.app)   { acc += w.w_app * *c.app;    mass += w.w_app; }
  if (c.shape) { acc += w.w_shape * *c.shape; mass += w.w_shape; }
  if (mass <= 0.0) return std::nullopt;
  return std::clamp(acc / mass, 0.0, 1.0);
}

// A cost-matrix row: a source detection plus the ego motion carrying its
// frame into the candidate frame (tracks held over a gap compose several
// frame-to-frame motions).
struct RowSource {
  const Detection* det = nullptr;
  RigidMotion motion;
};

namespace detail {

struct ColumnData {
  ConvexPolygon2D bbox_poly;
  double bbox_area = 0.0;
  std::optional<GatedRegion3D> region;
  const Detection* det = nullptr;
};

inline bool appearance_usable(const Detection& a, const Detection& b) {
  return a.features && b.features && a.features->psi.size() > 0 &&
         b.features->psi.size() > 0 &&
         a.features->psi.size() == b.features->psi.size();
}

}  // namespace detail

// Builds one cost-matrix from per-row sources against the candidate frame.
// Rows whose backprojection is degenerate (bottom edge at or above the
// horizon) fall back to appearance/shape-only costs over every column; rows
// with no computable cue at all end up fully gated.
inline CostMatrix build_cost_matrix_rows(std::span<const RowSource> rows,
                                         std::span<const Detection> cands,
                                         const CameraRig& rig,
                                         const CostWeights& weights,
                                         double sigma0 = kDefaultSigma0) {
  CostMatrix m = CostMatrix::gated(int(rows.size()), int(cands.size()));
  if (m.rows == 0 || m.cols == 0) return m;

  std::vector<detail::ColumnData> cols(cands.size());
  for (size_t j = 0; j < cands.size(); ++j) {
    cols[j].det = &cands[j];
    cols[j].bbox_poly = cands[j].bbox.polygon();
    cols[j].bbox_area = cands[j].bbox.area();
    try {
      cols[j].region = build_region(cands[j], rig, sigma0);
    } catch (const DegenerateHorizon&) {
    }
  }

  for (size_t i = 0; i < rows.size(); ++i) {
    const Detection& det = *rows[i].det;
    std::optional<GatedRegion3D> transported;
    std::optional<ConvexPolygon2D> gate;
    try {
      transported = transport_region(build_region(det, rig, sigma0),
                                     rows[i].motion);
      gate = project_region(*transported, rig);
    } catch (const DegenerateHorizon&) {
      transported.reset();
    } catch (const BehindCamera&) {
      transported.reset();
    }

    for (size_t j = 0; j < cands.size(); ++j) {
      ComponentCosts comp;
      if (gate) {
        const Overlap ov = polygon_overlap(*gate, cols[j].bbox_poly);
        if (ov.intersection <= 0.0) continue;  // outside the search area
        if (cols[j].bbox_area > 0.0) {
          comp.c3d2d = 1.0 - ov.intersection / cols[j].bbox_area;
        }
        if (cols[j].region) {
          const double c = cost_3d3d(*transported, *cols[j].region);
          if (!is_gated(c)) comp.c3d3d = c;
        }
      }
      if (detail::appearance_usable(det, *cols[j].det)) {
        comp.app = cost_appearance(*det.features, *cols[j].det->features,
                                   weights.eta_app);
      }
      if (det.features && cols[j].det->features) {
        comp.shape = cost_shape_pose(*det.features, *cols[j].det->features,
                                     weights.eta_s, weights.eta_p);
      }
      const std::optional<double> combined = combine_costs(weights, comp);
      if (!combined) continue;
      ++m.evaluated_count;
      if (*combined <= weights.gate_cost) m.at(int(i), int(j)) = *combined;
    }
  }
  return m;
}

// Pairwise costs between two frames under a single ego motion f -> f'.
inline CostMatrix build_cost_matrix(std::span<const Detection> dets_f,
                                    std::span<const Detection> dets_fprime,
                                    const RigidMotion& motion,
                                    const CameraRig& rig,
                                    const CostWeights& weights,
                                    double sigma0 = kDefaultSigma0) {
  std::vector<RowSource> rows(dets_f.size());
  for (size_t i = 0; i < dets_f.size(); ++i) rows[i] = {&dets_f[i], motion};
  return build_cost_matrix_rows(rows, dets_fprime, rig, weights, sigma0);
}

}  // namespace roadmot
