#pragma once

#include <algorithm>
#include <vector>

#include "roadmot/detection.hpp"

namespace roadmot {

// Score thresholding followed by greedy non-maximum suppression: boxes are
// visited by descending score (ties by left edge, then top edge) and kept iff
// their IoU with every already-kept box stays below nms_iou. The survivors
// come back in that same order.
inline std::vector<Detection> preprocess(std::vector<Detection> dets,
                                         double min_score, double nms_iou) {
  std::erase_if(dets, [&](const Detection& d) { return d.score < min_score; });
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.bbox.x != b.bbox.x) return a.bbox.x < b.bbox.x;
                     return a.bbox.y < b.bbox.y;
                   });
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (Detection& d : dets) {
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
          return iou(k.bbox, d.bbox) >= nms_iou;
        });
    if (!suppressed) kept.push_back(std::move(d));
  }
  return kept;
}

}  // namespace roadmot
