#pragma once

#include <optional>
#include <vector>

#include "roadmot/geometry/region.hpp"
#include "roadmot/io/kitti.hpp"
#include "roadmot/sim/rng.hpp"
#include "roadmot/sim/shape_model.hpp"

namespace roadmot::sim {

enum class MotionTemplate { ConstantVelocity, LaneChange, IntersectionTurn };

struct SimConfig {
  int frames = 50;
  int objects = 10;
  MotionTemplate motion = MotionTemplate::ConstantVelocity;
  double dt = 0.1;
  double camera_speed = 8.0;  // straight templates; the intersection camera is static
  int lanes = 3;
  double lane_width = 3.5;
  double depth_base = 11.0;   // nearest same-lane slot (m)
  double depth_ratio = 1.75;  // slot-to-slot depth ratio within a lane
  double score_lo = 0.8;      // detector confidence range for real objects
  double score_hi = 1.0;
  double crossing_stagger = 0.15;  // seconds between partners at a crossing
  double crossing_angle = M_PI / 2;  // heading difference at the crossing
  double pixel_sigma = 0.0;
  double dropout = 0.0;
  double clutter_rate = 0.0;
  int psi_dim = 8;
  double psi_distinct = 1.0;  // 0 = every object shares one descriptor
  double feature_sigma = 0.05;
  double lambda_sigma = 0.02;
  double omega_sigma = 0.02;
  double dims_sigma = 0.02;
  double ego_trans_sigma = 0.1;   // uncertainty budget stamped on ego motions
  double ego_rot_sigma = 0.005;
  CameraRig rig;
};

// Ground-truth trajectory of one simulated object. World frame = frame-0
// camera frame; the road plane sits at world Y = rig.h_cam.
struct SimObject {
  std::vector<Vec2> ground_xz;  // world (X, Z) per frame
  std::vector<double> yaw;      // world heading per frame
  Dimensions dims;
  Eigen::Matrix<double, 5, 1> lambda;
  Eigen::VectorXd psi;
};

struct SimScene {
  uint64_t seed = 0;
  SimConfig config;
  std::vector<SimObject> objects;
  std::vector<RigidMotion> camera_to_world;  // pose per frame, sigmas unused
};

namespace detail {

// Ground-truth image box of an object at one frame, anchored so that the
// bbox bottom-center is exactly the projection of the object's ground-contact
// center (the tracker's backprojection assumption). Empty when the box is
// not fully inside the image.
inline std::optional<BBox> project_object_box(const SimObject& obj, int f,
                                              const RigidMotion& cam_pose,
                                              const CameraRig& rig) {
  const Mat3 rwc = cam_pose.rotation.transpose();
  const Vec2 g = obj.ground_xz[f];
  const Vec3 ground_w(g.x(), rig.h_cam, g.y());
  const Vec3 ground_c = rwc * (ground_w - cam_pose.translation);
  if (ground_c.z() < 2.0) return std::nullopt;

  GatedRegion3D box;
  box.center = ground_c - Vec3(0.0, 0.5 * obj.dims.height, 0.0);
  box.half_extents = Vec3(0.5 * obj.dims.width, 0.5 * obj.dims.height,
                          0.5 * obj.dims.length);
  box.yaw = wrap_angle(obj.yaw[f] - cam_pose.yaw());

  double umin = 1e18, umax = -1e18, vmin = 1e18;
  for (const Vec3& corner : region_corners(box)) {
    if (corner.z() <= 0.5) return std::nullopt;
    const Vec2 px = project(corner, rig);
    umin = std::min(umin, px.x());
    umax = std::max(umax, px.x());
    vmin = std::min(vmin, px.y());
  }
  const Vec2 anchor = project(ground_c, rig);
  BBox b;
  b.w = umax - umin;
  b.h = anchor.y() - vmin;
  b.x = anchor.x() - 0.5 * b.w;
  b.y = anchor.y() - b.h;
  if (b.w < 3.0 || b.h < 3.0) return std::nullopt;
  if (b.x < 1.0 || b.y < 1.0 || b.right() > rig.image_width - 1.0 ||
      b.bottom() > rig.image_height - 1.0) {
    return std::nullopt;
  }
  return b;
}

// Per-frame GT boxes clipped to a single visibility interval: frames before
// the object first enters the view are empty, and once it leaves it stays
// gone. Every GT track is therefore one contiguous span.
inline std::vector<std::optional<BBox>> object_gt_boxes(
    const SimObject& obj, const std::vector<RigidMotion>& cam,
    const CameraRig& rig) {
  std::vector<std::optional<BBox>> boxes(cam.size());
  bool seen = false;
  for (size_t f = 0; f < cam.size(); ++f) {
    std::optional<BBox> box = project_object_box(obj, int(f), cam[f], rig);
    if (!box && seen) break;
    if (box) seen = true;
    boxes[f] = std::move(box);
  }
  return boxes;
}

inline double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

inline Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  const double n = v.norm();
  return n > 1e-12 ? Eigen::VectorXd(v / n) : Eigen::VectorXd::Unit(dim, 0);
}

// Piecewise-linear route through waypoints at constant speed. The yaw ramps
// across each corner over a +-2 m window so the pose cue sees a smooth turn.
struct Route {
  std::vector<Vec2> waypoints;
  double speed = 5.0;

  void sample(double t, Vec2& pos, double& yaw) const {
    std::vector<double> seg_len;
    double total = 0.0;
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
      seg_len.push_back((waypoints[i + 1] - waypoints[i]).norm());
      total += seg_len.back();
    }
    const double s = std::clamp(speed * t, 0.0, total - 1e-9);
    double acc = 0.0;
    size_t seg = 0;
    while (seg + 1 < seg_len.size() && s > acc + seg_len[seg]) {
      acc += seg_len[seg];
      ++seg;
    }
    auto heading = [&](size_t k) {
      const Vec2 d = (waypoints[k + 1] - waypoints[k]).normalized();
      return std::atan2(d.x(), d.y());  // about Y-down, +Z forward
    };
    const Vec2 dir = (waypoints[seg + 1] - waypoints[seg]).normalized();
    pos = waypoints[seg] + (s - acc) * dir;

    const double blend = 2.0;  // meters on each side of a corner
    const double into = s - acc;
    const double remain = seg_len[seg] - into;
    yaw = heading(seg);
    if (seg + 1 < seg_len.size() && remain < blend) {
      const double t01 = 0.5 * (1.0 - remain / blend);
      yaw += wrap_angle(heading(seg + 1) - yaw) * smoothstep(t01);
    } else if (seg > 0 && into < blend) {
      const double t01 = 0.5 + 0.5 * (into / blend);
      yaw = heading(seg - 1) +
            wrap_angle(heading(seg) - heading(seg - 1)) * smoothstep(t01);
    }
    yaw = wrap_angle(yaw);
  }
};

}  // namespace detail

// Deterministic scene synthesis. Objects are laid out so that (a) every one
// is visible from frame 0 and (b) no two ground-truth boxes overlap past IoU
// 0.45 on any shared frame, so preprocessing cannot merge distinct targets.
inline SimScene generate(const SimConfig& config, uint64_t seed) {
  SimScene scene;
  scene.seed = seed;
  scene.config = config;
  Rng rng(seed);

  const int F = config.frames;
  const bool intersection = config.motion == MotionTemplate::IntersectionTurn;
  for (int f = 0; f < F; ++f) {
    RigidMotion pose;
    if (!intersection) {
      pose.translation = Vec3(0.0, 0.0, config.camera_speed * config.dt * f);
    }
    scene.camera_to_world.push_back(pose);
  }

  const ShapeModel car = car_shape_model();

  // psi_distinct < 1 pulls descriptors toward a shared base: one base for
  // the whole scene on straight roads, one per crossing pair at junctions
  // (the "two similar-looking cars meet" stress case).
  const int psi_groups = intersection ? (config.objects + 1) / 2 : 1;
  std::vector<Eigen::VectorXd> group_psi;
  for (int g = 0; g < std::max(1, psi_groups); ++g) {
    group_psi.push_back(detail::random_unit(rng, config.psi_dim));
  }

  // Per-lane relative speed keeps same-lane depth ratios stable.
  std::vector<double> lane_rel_speed(std::max(1, config.lanes));
  for (double& v : lane_rel_speed) v = rng.uniform(-1.0, 0.6);

  auto draw_identity = [&](SimObject& obj, int group) {
    for (int b = 0; b < 5; ++b) obj.lambda[b] = rng.normal(0.0, 0.35);
    obj.dims = shape_dimensions(reconstruct_shape(car, obj.lambda));
    const Eigen::VectorXd own = detail::random_unit(rng, config.psi_dim);
    Eigen::VectorXd mix = config.psi_distinct * own +
                          (1.0 - config.psi_distinct) * group_psi[group];
    const double n = mix.norm();
    obj.psi = n > 1e-12 ? Eigen::VectorXd(mix / n) : own;
  };

  // Straight templates must keep targets separated on every frame so NMS
  // can never merge two ground-truth boxes. Intersections tolerate the brief
  // overlap spikes of a crossing but still reject corridor-sharing objects
  // that would occlude each other for long stretches.
  const int max_overlap_frames = intersection ? 4 : 0;
  auto accepted_boxes = std::vector<std::vector<std::optional<BBox>>>{};
  auto conflicts = [&](const SimObject& candidate) {
    const auto boxes =
        detail::object_gt_boxes(candidate, scene.camera_to_world, config.rig);
    int visible = 0;
    for (const auto& b : boxes) visible += b.has_value();
    if (visible < std::min(8, F)) return true;  // too brief to track
    for (const auto& other : accepted_boxes) {
      int overlapping = 0;
      for (int f = 0; f < F; ++f) {
        if (boxes[f] && other[f] && iou(*boxes[f], *other[f]) > 0.45) {
          if (++overlapping > max_overlap_frames) return true;
        }
      }
    }
    accepted_boxes.push_back(boxes);
    return false;
  };

  for (int i = 0; i < config.objects; ++i) {
    SimObject obj;
    draw_identity(obj, intersection ? std::min(i / 2, psi_groups - 1) : 0);
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      obj.ground_xz.assign(F, Vec2::Zero());
      obj.yaw.assign(F, 0.0);
      if (!intersection) {
        const int lane = i % std::max(1, config.lanes);
        const int slot = i / std::max(1, config.lanes);
        const double lane_x =
            (lane - 0.5 * (config.lanes - 1)) * config.lane_width +
            rng.uniform(-0.3, 0.3);
        // Geometric depth ladder keeps same-lane boxes from nesting too
        // tightly in the image.
        const double z0 = config.depth_base * std::pow(config.depth_ratio, slot) +
                          rng.uniform(0.0, 2.0);
        const double speed =
            config.camera_speed + lane_rel_speed[lane] + rng.uniform(-0.2, 0.2);
        const bool change_lane =
            config.motion == MotionTemplate::LaneChange && (i % 2 == 1) &&
            config.lanes > 1;
        const double shift =
            change_lane ? (lane == 0 ? config.lane_width
                                     : (lane == config.lanes - 1
                                            ? -config.lane_width
                                            : config.lane_width)) *
                              1.0
                        : 0.0;
        const int change_start = 10 + (i % 3) * 6;
        for (int f = 0; f < F; ++f) {
          double x = lane_x;
          double yaw = 0.0;
          if (change_lane) {
            const double t =
                detail::smoothstep((f - change_start) / 15.0);
            x += shift * t;
            const double t_next =
                detail::smoothstep((f + 1 - change_start) / 15.0);
            yaw = std::atan2((t_next - t) * shift, speed * config.dt);
          }
          obj.ground_xz[f] = Vec2(x, z0 + speed * config.dt * f);
          obj.yaw[f] = yaw;
        }
      } else {
        // Perpendicular turning routes. Partners (2k, 2k+1) approach the
        // junction on crossing corridors timed to arrive almost together, so
        // their predicted search regions collide while the headings differ
        // by a quarter turn. Corridors are spread per pair so unrelated
        // vehicles stay apart.
        // One junction, crossings staged in time: pair p meets near frame
        // 11 + 11p. Cars start far enough back to arrive on cue and simply
        // enter the view partway through the sequence when needed.
        const int pair = i / 2;
        sim::Rng pair_rng(seed ^ (0x51ed2701abcdef11ull +
                                  uint64_t(pair) * 0x9e3779b97f4a7c15ull));
        const double meet_t =
            (11.0 + 11.0 * pair + pair_rng.uniform(-1.0, 1.0)) * config.dt;
        const double cross_x = -2.0 + pair_rng.uniform(-0.6, 0.6);
        const double cross_z = 21.0 + pair_rng.uniform(-0.8, 0.8);
        const double stagger =
            config.crossing_stagger + pair_rng.uniform(0.0, 0.1);

        detail::Route route;
        if (i % 2 == 0) {  // northbound through the crossing, then east
          route.speed = std::clamp(8.2 + rng.uniform(-0.4, 0.4), 3.0, 15.0);
          const double corner_z = cross_z + 3.0 + rng.uniform(0.0, 0.8);
          const double z_start = cross_z - route.speed * meet_t;
          route.waypoints = {Vec2(cross_x, z_start), Vec2(cross_x, corner_z),
                             Vec2(40.0, corner_z)};
        } else {  // crossing partner: arrives `stagger` later, turns north
          const double theta = config.crossing_angle;
          const Vec2 dir(std::sin(theta), std::cos(theta));
          route.speed = std::clamp(5.5 + rng.uniform(-0.5, 0.5), 3.0, 15.0);
          const Vec2 cross(cross_x, cross_z);
          const Vec2 start = cross - route.speed * (meet_t + stagger) * dir;
          const Vec2 corner = cross + (6.0 + rng.uniform(0.0, 0.8)) * dir;
          const double exit_yaw = theta - M_PI / 2;
          const Vec2 exit_dir(std::sin(exit_yaw), std::cos(exit_yaw));
          route.waypoints = {start, corner, corner + 30.0 * exit_dir};
        }
        for (int f = 0; f < F; ++f) {
          Vec2 pos;
          double yaw;
          route.sample(f * config.dt, pos, yaw);
          obj.ground_xz[f] = pos;
          obj.yaw[f] = yaw;
        }
      }
      placed = !conflicts(obj);
    }
    if (placed) scene.objects.push_back(std::move(obj));
  }
  return scene;
}

// Renders a scene to detections + features + ego motions + ground truth.
// Ground truth is recorded before any corruption; detections then suffer
// corner noise, dropout, and Poisson clutter.
inline SequenceBundle render(const SimScene& scene) {
  const SimConfig& cfg = scene.config;
  Rng rng(scene.seed ^ 0x9e3779b97f4a7c15ull);

  SequenceBundle bundle;
  bundle.rig = cfg.rig;
  bundle.frames.assign(cfg.frames, {});
  for (int f = 0; f + 1 < cfg.frames; ++f) {
    const RigidMotion& a = scene.camera_to_world[f];
    const RigidMotion& b = scene.camera_to_world[f + 1];
    RigidMotion m;
    m.rotation = b.rotation.transpose() * a.rotation;
    m.translation = b.rotation.transpose() * (a.translation - b.translation);
    m.trans_sigma = cfg.ego_trans_sigma;
    m.rot_sigma = cfg.ego_rot_sigma;
    bundle.motions.push_back(std::move(m));
  }

  std::vector<std::vector<std::optional<BBox>>> gt_boxes;
  for (const SimObject& obj : scene.objects) {
    gt_boxes.push_back(
        detail::object_gt_boxes(obj, scene.camera_to_world, cfg.rig));
  }

  for (size_t i = 0; i < scene.objects.size(); ++i) {
    Track t;
    t.id = int(i) + 1;
    for (int f = 0; f < cfg.frames; ++f) {
      if (!gt_boxes[i][f]) continue;
      Detection d;
      d.frame = f;
      d.bbox = *gt_boxes[i][f];
      d.score = 1.0;
      t.entries.push_back({f, std::move(d)});
    }
    if (!t.entries.empty()) bundle.gt.push_back(std::move(t));
  }

  for (int f = 0; f < cfg.frames; ++f) {
    const double cam_yaw = scene.camera_to_world[f].yaw();
    for (size_t i = 0; i < scene.objects.size(); ++i) {
      if (!gt_boxes[i][f]) continue;
      if (rng.uniform() < cfg.dropout) continue;
      const SimObject& obj = scene.objects[i];
      const BBox& g = *gt_boxes[i][f];

      double x1 = g.left() + rng.normal(0.0, cfg.pixel_sigma);
      double y1 = g.top() + rng.normal(0.0, cfg.pixel_sigma);
      double x2 = g.right() + rng.normal(0.0, cfg.pixel_sigma);
      double y2 = g.bottom() + rng.normal(0.0, cfg.pixel_sigma);
      if (x2 < x1 + 1.0) x2 = x1 + 1.0;
      if (y2 < y1 + 1.0) y2 = y1 + 1.0;

      Detection d;
      d.frame = f;
      d.bbox = {x1, y1, x2 - x1, y2 - y1};
      d.score = rng.uniform(cfg.score_lo, cfg.score_hi);

      ObjectFeatures feat;
      feat.psi = obj.psi;
      for (int k = 0; k < feat.psi.size(); ++k) {
        feat.psi[k] += rng.normal(0.0, cfg.feature_sigma);
      }
      feat.lambda = obj.lambda;
      for (int k = 0; k < 5; ++k) {
        feat.lambda[k] += rng.normal(0.0, cfg.lambda_sigma);
      }
      const double rel_yaw = wrap_angle(obj.yaw[f] - cam_yaw +
                                        rng.normal(0.0, cfg.omega_sigma));
      feat.omega = Vec3(0.0, rel_yaw, 0.0);
      feat.dims.height =
          std::max(0.5, obj.dims.height + rng.normal(0.0, cfg.dims_sigma));
      feat.dims.width =
          std::max(0.5, obj.dims.width + rng.normal(0.0, cfg.dims_sigma));
      feat.dims.length =
          std::max(0.5, obj.dims.length + rng.normal(0.0, cfg.dims_sigma));
      d.features = std::move(feat);
      bundle.frames[f].push_back(std::move(d));
    }

    const int n_clutter = rng.poisson(cfg.clutter_rate);
    for (int k = 0; k < n_clutter; ++k) {
      const double w = rng.uniform(30.0, 110.0);
      const double h = w * rng.uniform(0.55, 0.9);
      const double u = rng.uniform(40.0, cfg.rig.image_width - 40.0);
      const double v = rng.uniform(cfg.rig.cy + 15.0, cfg.rig.image_height - 5.0);
      Detection d;
      d.frame = f;
      d.bbox = {u - 0.5 * w, std::max(1.0, v - h), w,
                h - std::max(0.0, h - (v - 1.0))};
      if (d.bbox.h < 3.0) continue;
      d.score = rng.uniform(0.3, 0.95);
      ObjectFeatures feat;
      feat.psi = detail::random_unit(rng, cfg.psi_dim);
      for (int b = 0; b < 5; ++b) feat.lambda[b] = rng.normal(0.0, 0.35);
      feat.omega = Vec3(0.0, rng.uniform(-M_PI + 0.01, M_PI - 0.01), 0.0);
      feat.dims = Dimensions{};
      d.features = std::move(feat);
      bundle.frames[f].push_back(std::move(d));
    }
  }
  return bundle;
}

// Writes a rendered scene using the same file grammars the tracker reads.
inline void write_scene_files(const SimScene& scene,
                              const SequenceBundle& bundle,
                              const std::string& dir) {
  write_detections(bundle.frames, dir + "/detections.csv");
  write_features(bundle.frames, dir + "/features.csv");
  write_calib(bundle.rig, dir + "/calib.txt");
  write_poses(scene.camera_to_world, dir + "/poses.txt");
  write_ground_truth(bundle.gt, dir + "/gt.txt");
}

}  // namespace roadmot::sim
