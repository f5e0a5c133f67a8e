#pragma once

#include <map>
#include <vector>

#include "roadmot/assoc/hungarian.hpp"
#include "roadmot/assoc/tracker.hpp"

namespace roadmot {

// CLEAR MOT summary for one sequence or split. mt/pt/ml are percentages of
// ground-truth tracks; counts are totals over all frames.
struct MOTReport {
  double mota = 0.0;
  double motp = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double mt = 0.0;
  double pt = 0.0;
  double ml = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long ids = 0;
  long long frag = 0;
  long long gt_count = 0;
};

struct FrameBox {
  int id = 0;
  BBox box;
};

struct FrameMatch {
  int gt_id = 0;
  int hyp_id = 0;
  double iou = 0.0;
};

// One frame of the CLEAR MOT matching: pairs carried over from the previous
// frame persist while their IoU stays above iou_min; the rest is a min-cost
// matching on 1 - IoU with sub-threshold pairs forbidden.
inline std::vector<FrameMatch> match_frame(const std::vector<FrameBox>& gt,
                                           const std::vector<FrameBox>& hyp,
                                           double iou_min,
                                           const std::vector<FrameMatch>& carry) {
  std::vector<FrameMatch> matches;
  std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);

  for (const FrameMatch& prev : carry) {
    int gi = -1, hi = -1;
    for (int i = 0; i < int(gt.size()); ++i) {
      if (!gt_used[i] && gt[i].id == prev.gt_id) { gi = i; break; }
    }
    for (int j = 0; j < int(hyp.size()); ++j) {
      if (!hyp_used[j] && hyp[j].id == prev.hyp_id) { hi = j; break; }
    }
    if (gi < 0 || hi < 0) continue;
    const double overlap = iou(gt[gi].box, hyp[hi].box);
    if (overlap >= iou_min) {
      matches.push_back({prev.gt_id, prev.hyp_id, overlap});
      gt_used[gi] = 1;
      hyp_used[hi] = 1;
    }
  }

  std::vector<int> gt_rest, hyp_rest;
  for (int i = 0; i < int(gt.size()); ++i) if (!gt_used[i]) gt_rest.push_back(i);
  for (int j = 0; j < int(hyp.size()); ++j) if (!hyp_used[j]) hyp_rest.push_back(j);
  if (gt_rest.empty() || hyp_rest.empty()) return matches;

  CostMatrix m = CostMatrix::gated(int(gt_rest.size()), int(hyp_rest.size()));
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      const double overlap = iou(gt[gt_rest[i]].box, hyp[hyp_rest[j]].box);
      if (overlap >= iou_min) m.at(i, j) = 1.0 - overlap;
    }
  }
  for (const auto& [i, j] : hungarian(m).pairs) {
    matches.push_back({gt[gt_rest[i]].id, hyp[hyp_rest[j]].id,
                       iou(gt[gt_rest[i]].box, hyp[hyp_rest[j]].box)});
  }
  return matches;
}

namespace detail {

inline std::map<int, std::vector<FrameBox>> boxes_by_frame(
    const std::vector<Track>& tracks) {
  std::map<int, std::vector<FrameBox>> out;
  for (const Track& t : tracks) {
    for (const TrackEntry& e : t.entries) {
      out[e.frame].push_back({t.id, e.det.bbox});
    }
  }
  return out;
}

}  // namespace detail

// Scores hypothesis tracks against ground truth with the CLEAR MOT protocol:
//   MOTA = 1 - (FN + FP + IDS) / gt_count, MOTP = mean matched IoU,
//   IDS = changes of the matched hypothesis id between a GT track's
//   consecutive matched frames, FRAG = matched->unmatched->matched
//   transitions, MT/PT/ML at 80% / 20% coverage of a GT track's own frames.
inline MOTReport score_tracks(const std::vector<Track>& gt_tracks,
                              const std::vector<Track>& hyp_tracks,
                              double iou_min = 0.5) {
  MOTReport rep;
  const auto gt_frames = detail::boxes_by_frame(gt_tracks);
  const auto hyp_frames = detail::boxes_by_frame(hyp_tracks);
  for (const auto& [frame, boxes] : gt_frames) rep.gt_count += boxes.size();
  if (rep.gt_count == 0) {
    throw EmptyGroundTruth("no ground-truth boxes to score against");
  }

  std::map<int, std::map<int, int>> gt_matched_id;  // gt id -> frame -> hyp id
  double iou_sum = 0.0;
  std::vector<FrameMatch> carry;

  int last_frame = gt_frames.rbegin()->first;
  if (!hyp_frames.empty()) {
    last_frame = std::max(last_frame, hyp_frames.rbegin()->first);
  }
  static const std::vector<FrameBox> kNone;
  for (int f = 0; f <= last_frame; ++f) {
    const auto gi = gt_frames.find(f);
    const auto hi = hyp_frames.find(f);
    const std::vector<FrameBox>& g = gi == gt_frames.end() ? kNone : gi->second;
    const std::vector<FrameBox>& h = hi == hyp_frames.end() ? kNone : hi->second;
    const std::vector<FrameMatch> matches = match_frame(g, h, iou_min, carry);
    rep.tp += matches.size();
    rep.fn += long(g.size()) - long(matches.size());
    rep.fp += long(h.size()) - long(matches.size());
    for (const FrameMatch& match : matches) {
      iou_sum += match.iou;
      gt_matched_id[match.gt_id][f] = match.hyp_id;
    }
    carry = matches;
  }

  long long mt = 0, pt = 0, ml = 0;
  for (const Track& t : gt_tracks) {
    const auto& matched = gt_matched_id[t.id];
    int prev_hyp = -1;
    for (const auto& [frame, hyp_id] : matched) {
      if (prev_hyp >= 0 && hyp_id != prev_hyp) ++rep.ids;
      prev_hyp = hyp_id;
    }
    bool seen_match = false;
    bool in_gap = false;
    long long covered = 0;
    for (const TrackEntry& e : t.entries) {
      if (matched.count(e.frame)) {
        ++covered;
        if (seen_match && in_gap) ++rep.frag;
        seen_match = true;
        in_gap = false;
      } else if (seen_match) {
        in_gap = true;
      }
    }
    const double coverage =
        t.entries.empty() ? 0.0 : double(covered) / double(t.entries.size());
    if (coverage >= 0.8) ++mt;
    else if (coverage <= 0.2) ++ml;
    else ++pt;
  }

  const long long n_tracks = long(gt_tracks.size());
  rep.mota = 1.0 - double(rep.fn + rep.fp + rep.ids) / double(rep.gt_count);
  rep.motp = rep.tp > 0 ? iou_sum / double(rep.tp) : 0.0;
  rep.recall = double(rep.tp) / double(rep.gt_count);
  rep.precision =
      rep.tp + rep.fp > 0 ? double(rep.tp) / double(rep.tp + rep.fp) : 0.0;
  if (n_tracks > 0) {
    rep.mt = 100.0 * double(mt) / double(n_tracks);
    rep.pt = 100.0 * double(pt) / double(n_tracks);
    rep.ml = 100.0 * double(ml) / double(n_tracks);
  }
  return rep;
}

}  // namespace roadmot
