#pragma once

#include <chrono>
#include <vector>

#include "roadmot/assoc/hungarian.hpp"
#include "roadmot/assoc/nms.hpp"
#include "roadmot/costs/cost_matrix.hpp"

namespace roadmot {

enum class TrackState { Active, Terminated };

struct TrackEntry {
  int frame = 0;
  Detection det;
};

// One target trajectory: at most one detection per frame, frames strictly
// increasing, id unique within a sequence.
struct Track {
  int id = 0;
  std::vector<TrackEntry> entries;
  int misses = 0;
  TrackState state = TrackState::Active;

  const TrackEntry& last() const { return entries.back(); }
};

struct TrackerConfig {
  double min_score = 0.5;
  double nms_iou = 0.5;
  double sigma0 = kDefaultSigma0;
  int hold_frames = 0;
  CostWeights weights;
};

// Per-frame association cost bookkeeping for the timing log.
struct FrameStats {
  int frame = 0;
  double cost_assoc_ms = 0.0;
  int evaluated = 0;
  int rows = 0;
  int cols = 0;
};

// Applies one frame's assignment: matched tracks extend and reset their miss
// counter, unmatched tracks age out once misses exceed hold_frames, and
// unmatched detections found new tracks. `active` lists the track index
// behind each cost-matrix row.
inline void step_tracks(std::vector<Track>& tracks, int& next_id, int frame,
                        const std::vector<Detection>& dets,
                        const std::vector<int>& active, const Assignment& asg,
                        int hold_frames) {
  for (const auto& [row, col] : asg.pairs) {
    Track& t = tracks[active[row]];
    t.entries.push_back({frame, dets[col]});
    t.misses = 0;
  }
  for (int row : asg.unmatched_rows) {
    Track& t = tracks[active[row]];
    if (++t.misses > hold_frames) t.state = TrackState::Terminated;
  }
  for (int col : asg.unmatched_cols) {
    tracks.push_back(Track{next_id++, {{frame, dets[col]}}, 0,
                           TrackState::Active});
  }
}

// Runs the two-frame tracker over a whole sequence: preprocess each frame,
// build the gated cost matrix against the active tracks, solve the bipartite
// assignment, and update track lifecycles. motions[f] must carry frame f
// into frame f+1; tracks surviving a gap are transported by the composition
// of the in-between motions.
inline std::vector<Track> run_sequence(
    const std::vector<std::vector<Detection>>& frames,
    const std::vector<RigidMotion>& motions, const CameraRig& rig,
    const TrackerConfig& cfg, std::vector<FrameStats>* stats = nullptr) {
  std::vector<Track> tracks;
  if (frames.empty()) return tracks;
  if (motions.size() + 1 != frames.size()) {
    throw InputMisaligned("got " + std::to_string(motions.size()) +
                          " motions for " + std::to_string(frames.size()) +
                          " frames");
  }

  int next_id = 1;
  for (const Detection& d : preprocess(frames[0], cfg.min_score, cfg.nms_iou)) {
    tracks.push_back(Track{next_id++, {{0, d}}, 0, TrackState::Active});
  }

  for (int f = 1; f < int(frames.size()); ++f) {
    const std::vector<Detection> dets =
        preprocess(frames[f], cfg.min_score, cfg.nms_iou);

    std::vector<int> active;
    std::vector<RowSource> rows;
    for (int t = 0; t < int(tracks.size()); ++t) {
      if (tracks[t].state != TrackState::Active) continue;
      active.push_back(t);
      RigidMotion motion = motions[tracks[t].last().frame];
      for (int k = tracks[t].last().frame + 1; k < f; ++k) {
        motion = compose(motions[k], motion);
      }
      rows.push_back({&tracks[t].last().det, motion});
    }

    const auto t0 = std::chrono::steady_clock::now();
    const CostMatrix m =
        build_cost_matrix_rows(rows, dets, rig, cfg.weights, cfg.sigma0);
    const Assignment asg = hungarian(m);
    const auto t1 = std::chrono::steady_clock::now();

    step_tracks(tracks, next_id, f, dets, active, asg, cfg.hold_frames);
    if (stats) {
      stats->push_back(
          {f, std::chrono::duration<double, std::milli>(t1 - t0).count(),
           m.evaluated_count, m.rows, m.cols});
    }
  }
  return tracks;
}

}  // namespace roadmot
