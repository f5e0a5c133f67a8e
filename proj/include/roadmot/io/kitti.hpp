#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "roadmot/assoc/tracker.hpp"
#include "roadmot/detection.hpp"
#include "roadmot/geometry/rigid_motion.hpp"

namespace roadmot {

// Everything one sequence needs: per-frame detections (features attached),
// the camera rig, frame-to-frame ego motions, and optional ground truth.
struct SequenceBundle {
  std::vector<std::vector<Detection>> frames;
  CameraRig rig;
  std::vector<RigidMotion> motions;
  std::vector<Track> gt;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

inline double to_double(const std::string& s, int line_no) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line_no);
  }
  if (pos != s.size()) throw ParseError("not a number: '" + s + "'", line_no);
  return v;
}

inline int to_int(const std::string& s, int line_no) {
  const double v = to_double(s, line_no);
  if (v != double(long(v))) throw ParseError("not an integer: '" + s + "'", line_no);
  return int(v);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// --- detections.csv: `frame,x,y,w,h,score`, one detection per line ---------

inline std::vector<std::vector<Detection>> read_detections(
    const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::vector<std::vector<Detection>> frames;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 6) {
      throw ParseError("expected frame,x,y,w,h,score", line_no);
    }
    Detection d;
    d.frame = detail::to_int(f[0], line_no);
    if (d.frame < 0) throw ParseError("negative frame index", line_no);
    d.bbox = {detail::to_double(f[1], line_no), detail::to_double(f[2], line_no),
              detail::to_double(f[3], line_no), detail::to_double(f[4], line_no)};
    d.score = detail::to_double(f[5], line_no);
    if (d.bbox.w <= 0.0 || d.bbox.h <= 0.0) {
      throw NegativeDimension("non-positive box dimension", line_no);
    }
    if (d.frame >= int(frames.size())) frames.resize(d.frame + 1);
    frames[d.frame].push_back(std::move(d));
  }
  return frames;
}

inline void write_detections(const std::vector<std::vector<Detection>>& frames,
                             const std::string& path) {
  std::ofstream out(path);
  for (size_t f = 0; f < frames.size(); ++f) {
    for (const Detection& d : frames[f]) {
      out << f << ',' << detail::fmt_full(d.bbox.x) << ','
          << detail::fmt_full(d.bbox.y) << ',' << detail::fmt_full(d.bbox.w)
          << ',' << detail::fmt_full(d.bbox.h) << ','
          << detail::fmt_full(d.score) << '\n';
    }
  }
}

// --- features.csv: header `d=<int>`, then rows ------------------------------
// `frame,det_index,psi[0..d),lambda[0..5),omega[0..3),h,w,l`, matched to the
// detection list by (frame, index within frame). Missing rows simply leave
// the detection without features.

inline void read_features(const std::string& path,
                          std::vector<std::vector<Detection>>& frames) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  int line_no = 0;
  int d = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (d < 0) {
      if (line.rfind("d=", 0) != 0) {
        throw ParseError("expected header 'd=<descriptor length>'", line_no);
      }
      d = detail::to_int(line.substr(2), line_no);
      if (d < 0) throw ParseError("negative descriptor length", line_no);
      continue;
    }
    const auto f = detail::split(line, ',');
    if (int(f.size()) != 2 + d + 5 + 3 + 3) {
      throw DimensionMismatch("feature row with " + std::to_string(f.size()) +
                              " fields, expected " + std::to_string(2 + d + 11) +
                              " (line " + std::to_string(line_no) + ")");
    }
    const int frame = detail::to_int(f[0], line_no);
    const int index = detail::to_int(f[1], line_no);
    ObjectFeatures feat;
    feat.psi.resize(d);
    int k = 2;
    for (int i = 0; i < d; ++i) feat.psi[i] = detail::to_double(f[k++], line_no);
    for (int i = 0; i < 5; ++i) feat.lambda[i] = detail::to_double(f[k++], line_no);
    for (int i = 0; i < 3; ++i) feat.omega[i] = detail::to_double(f[k++], line_no);
    feat.dims.height = detail::to_double(f[k++], line_no);
    feat.dims.width = detail::to_double(f[k++], line_no);
    feat.dims.length = detail::to_double(f[k++], line_no);
    if (frame >= 0 && frame < int(frames.size()) && index >= 0 &&
        index < int(frames[frame].size())) {
      frames[frame][index].features = std::move(feat);
    }
  }
}

inline void write_features(const std::vector<std::vector<Detection>>& frames,
                           const std::string& path) {
  std::ofstream out(path);
  int d = 0;
  for (const auto& frame : frames) {
    for (const Detection& det : frame) {
      if (det.features) d = std::max(d, int(det.features->psi.size()));
    }
  }
  out << "d=" << d << '\n';
  for (size_t f = 0; f < frames.size(); ++f) {
    for (size_t i = 0; i < frames[f].size(); ++i) {
      const auto& feat = frames[f][i].features;
      if (!feat || int(feat->psi.size()) != d) continue;
      out << f << ',' << i;
      for (int k = 0; k < d; ++k) out << ',' << detail::fmt_full(feat->psi[k]);
      for (int k = 0; k < 5; ++k) out << ',' << detail::fmt_full(feat->lambda[k]);
      for (int k = 0; k < 3; ++k) out << ',' << detail::fmt_full(feat->omega[k]);
      out << ',' << detail::fmt_full(feat->dims.height) << ','
          << detail::fmt_full(feat->dims.width) << ','
          << detail::fmt_full(feat->dims.length) << '\n';
    }
  }
}

// --- calib.txt: KITTI-style `KEY: values` lines ------------------------------
// `P2:` (12 reals, row-major 3x4) is required and provides the intrinsics.
// Optional extensions: `GP: nx ny nz h_cam` for the ground plane and
// `SIZE: width height`; unknown keys are ignored as in KITTI calib files.

inline CameraRig read_calib(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  CameraRig rig;
  bool have_p2 = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields[0] == "P2:") {
      if (fields.size() != 13) {
        throw ParseError("P2 needs 12 values, got " +
                             std::to_string(fields.size() - 1),
                         line_no);
      }
      double p[12];
      for (int i = 0; i < 12; ++i) p[i] = detail::to_double(fields[i + 1], line_no);
      rig.fx = p[0];
      rig.fy = p[5];
      rig.cx = p[2];
      rig.cy = p[6];
      have_p2 = true;
    } else if (fields[0] == "GP:") {
      if (fields.size() != 5) throw ParseError("GP needs 4 values", line_no);
      rig.n = Vec3(detail::to_double(fields[1], line_no),
                   detail::to_double(fields[2], line_no),
                   detail::to_double(fields[3], line_no));
      rig.n.normalize();
      rig.h_cam = detail::to_double(fields[4], line_no);
    } else if (fields[0] == "SIZE:") {
      if (fields.size() != 3) throw ParseError("SIZE needs 2 values", line_no);
      rig.image_width = detail::to_int(fields[1], line_no);
      rig.image_height = detail::to_int(fields[2], line_no);
    }
  }
  if (!have_p2) throw Error("no P2 line in " + path);
  return rig;
}

inline void write_calib(const CameraRig& rig, const std::string& path) {
  std::ofstream out(path);
  out << "P2: " << detail::fmt_full(rig.fx) << " 0 " << detail::fmt_full(rig.cx)
      << " 0 0 " << detail::fmt_full(rig.fy) << ' ' << detail::fmt_full(rig.cy)
      << " 0 0 0 1 0\n";
  out << "GP: " << detail::fmt_full(rig.n.x()) << ' '
      << detail::fmt_full(rig.n.y()) << ' ' << detail::fmt_full(rig.n.z())
      << ' ' << detail::fmt_full(rig.h_cam) << '\n';
  out << "SIZE: " << rig.image_width << ' ' << rig.image_height << '\n';
}

// --- poses.txt: one camera-to-world 3x4 (12 reals, row-major) per frame -----
// Frame-to-frame motions come out as world-to-camera compositions between
// consecutive poses; rotations are SVD re-orthonormalized and rejected when
// the residual exceeds 1e-6.

inline std::vector<RigidMotion> read_poses(const std::string& path,
                                           double trans_sigma = 0.0,
                                           double rot_sigma = 0.0) {
  std::ifstream in = detail::open_input(path);
  std::vector<Mat3> rot;
  std::vector<Vec3> trans;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_ws(line);
    if (f.size() != 12) {
      throw ParseError("pose line needs 12 values, got " +
                           std::to_string(f.size()),
                       line_no);
    }
    Mat3 r;
    Vec3 t;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        r(row, col) = detail::to_double(f[row * 4 + col], line_no);
      }
      t(row) = detail::to_double(f[row * 4 + 3], line_no);
    }
    const double residual =
        (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (residual > 1e-6 || r.determinant() < 0.0) {
      throw NonOrthonormalRotation("pose rotation residual " +
                                   std::to_string(residual) + " at line " +
                                   std::to_string(line_no));
    }
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rot.push_back(svd.matrixU() * svd.matrixV().transpose());
    trans.push_back(t);
  }
  std::vector<RigidMotion> motions;
  for (size_t f = 0; f + 1 < rot.size(); ++f) {
    RigidMotion m;
    m.rotation = rot[f + 1].transpose() * rot[f];
    m.translation = rot[f + 1].transpose() * (trans[f] - trans[f + 1]);
    m.trans_sigma = trans_sigma;
    m.rot_sigma = rot_sigma;
    motions.push_back(std::move(m));
  }
  return motions;
}

inline void write_poses(const std::vector<RigidMotion>& camera_to_world,
                        const std::string& path) {
  std::ofstream out(path);
  for (const RigidMotion& pose : camera_to_world) {
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        out << detail::fmt_full(pose.rotation(row, col)) << ' ';
      }
      out << detail::fmt_full(pose.translation(row));
      out << (row == 2 ? '\n' : ' ');
    }
  }
}

// --- KITTI tracking labels / results -----------------------------------------
// Result lines:
//   frame id Car -1 -1 -10 left top right bottom -1 -1 -1 -1000 -1000 -1000 -10 score
// Ground-truth label lines use the same layout without the trailing score.
// Floats are written with 2 decimals so a write->read->write round trip is
// byte identical.

inline void write_results(const std::vector<Track>& tracks,
                          const std::string& path) {
  struct Row {
    int frame, id;
    BBox box;
    double score;
  };
  std::vector<Row> rows;
  for (const Track& t : tracks) {
    for (const TrackEntry& e : t.entries) {
      rows.push_back({e.frame, t.id, e.det.bbox, e.det.score});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::ofstream out(path);
  for (const Row& r : rows) {
    out << r.frame << ' ' << r.id << " Car -1 -1 -10 " << detail::fmt2(r.box.left())
        << ' ' << detail::fmt2(r.box.top()) << ' ' << detail::fmt2(r.box.right())
        << ' ' << detail::fmt2(r.box.bottom())
        << " -1 -1 -1 -1000 -1000 -1000 -10 " << detail::fmt2(r.score) << '\n';
  }
}

inline void write_ground_truth(const std::vector<Track>& tracks,
                               const std::string& path) {
  struct Row {
    int frame, id;
    BBox box;
  };
  std::vector<Row> rows;
  for (const Track& t : tracks) {
    for (const TrackEntry& e : t.entries) {
      rows.push_back({e.frame, t.id, e.det.bbox});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::ofstream out(path);
  for (const Row& r : rows) {
    out << r.frame << ' ' << r.id << " Car 0 0 -10 " << detail::fmt2(r.box.left())
        << ' ' << detail::fmt2(r.box.top()) << ' ' << detail::fmt2(r.box.right())
        << ' ' << detail::fmt2(r.box.bottom())
        << " -1 -1 -1 -1000 -1000 -1000 -10\n";
  }
}

// Reads KITTI tracking lines (labels or results) into tracks. Classes other
// than Car (e.g. DontCare) are skipped.
inline std::vector<Track> read_tracks(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::map<int, Track> by_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_ws(line);
    if (f.size() != 17 && f.size() != 18) {
      throw ParseError("expected 17 (label) or 18 (result) fields, got " +
                           std::to_string(f.size()),
                       line_no);
    }
    if (f[2] != "Car") continue;
    const int frame = detail::to_int(f[0], line_no);
    const int id = detail::to_int(f[1], line_no);
    const double left = detail::to_double(f[6], line_no);
    const double top = detail::to_double(f[7], line_no);
    const double right = detail::to_double(f[8], line_no);
    const double bottom = detail::to_double(f[9], line_no);
    Detection det;
    det.frame = frame;
    det.bbox = {left, top, right - left, bottom - top};
    det.score = f.size() == 18 ? detail::to_double(f[17], line_no) : 1.0;
    Track& t = by_id[id];
    t.id = id;
    t.entries.push_back({frame, std::move(det)});
  }
  std::vector<Track> tracks;
  for (auto& [id, t] : by_id) {
    std::sort(t.entries.begin(), t.entries.end(),
              [](const TrackEntry& a, const TrackEntry& b) {
                return a.frame < b.frame;
              });
    tracks.push_back(std::move(t));
  }
  return tracks;
}

// Loads a whole sequence directory's worth of files. The pose file defines
// the frame count; detections referencing frames beyond it are rejected.
inline SequenceBundle load_bundle(const std::string& detections_path,
                                  const std::string& features_path,
                                  const std::string& calib_path,
                                  const std::string& poses_path,
                                  const std::string& gt_path = "",
                                  double trans_sigma = 0.0,
                                  double rot_sigma = 0.0) {
  SequenceBundle bundle;
  bundle.frames = read_detections(detections_path);
  bundle.rig = read_calib(calib_path);
  bundle.motions = read_poses(poses_path, trans_sigma, rot_sigma);
  const size_t frame_count = bundle.motions.size() + 1;
  if (bundle.frames.size() > frame_count) {
    throw InputMisaligned("detections reference frame " +
                          std::to_string(bundle.frames.size() - 1) + " but " +
                          poses_path + " has only " +
                          std::to_string(frame_count) + " poses");
  }
  bundle.frames.resize(frame_count);
  if (!features_path.empty()) read_features(features_path, bundle.frames);
  if (!gt_path.empty()) bundle.gt = read_tracks(gt_path);
  return bundle;
}

}  // namespace roadmot
