// Copyright 2026 The Vipseval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Tube-based Video Panoptic Quality.
//
// For a window size k, every stride-1 clip [t, t+k-1] of a video turns each
// segment id into a tube (its pixels across the clip). A (pred, gt) tube
// pair is a true positive iff the categories match and the tube IoU exceeds
// 0.5, with ground-truth-void pixels excluded from the IoU; that rule makes
// the match unique on both sides. Unmatched ground-truth tubes count as
// false negatives. Unmatched prediction tubes count as false positives
// unless more than half of their pixels lie on ground-truth void, in which
// case they are ignored (configurable). Stats accumulate per class over all
// clips and videos before division:
//
//   VPQ_c^k = iou_sum_c / (tp_c + fp_c/2 + fn_c/2)
//   VPQ^k   = unweighted mean over classes with tp+fp+fn > 0
//   overall = arithmetic mean of the VPQ^k values
//
// Videos shorter than k contribute one whole-video clip. Accumulation uses
// integer counts plus compensated float sums reduced in sorted-video-id
// order, so results are bit-identical for any worker count and any video
// order in the manifests.

#ifndef VIPSEVAL_METRICS_VPQ_HPP
#define VIPSEVAL_METRICS_VPQ_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vipseval/core.hpp"
#include "vipseval/threading.hpp"

namespace vipseval {

struct VpqOptions {
  // When true, unmatched prediction tubes whose pixels lie mostly on
  // ground-truth void are counted as false positives instead of ignored.
  bool count_void_pred_as_fp = false;
  int threads = 1;
};

// One segment's per-frame pixel sets within a clip. Pixels are linear
// row-major indexes; frame_pixels[i] belongs to absolute frame
// start_frame + i and must be sorted ascending.
struct SegmentTube {
  std::uint32_t segment_id = 0;
  std::int32_t category_id = 0;
  int start_frame = 0;
  std::vector<std::vector<std::uint32_t>> frame_pixels;
};

// Sum_t |p_t & g_t| / Sum_t |p_t | g_t|. When `gt_frames` is given, pixels
// whose ground-truth raster value is void in that frame are excluded from
// both numerator and denominator. Tubes must share the clip span.
double tube_iou(const SegmentTube& pred, const SegmentTube& gt,
                const std::vector<IdRaster>* gt_frames = nullptr);

// Per-class tube stats for one video and one window size.
std::map<std::int32_t, VpqClassStats> vpq_window(const VideoPanopticSequence& gt,
                                                 const VideoPanopticSequence& pred, int window,
                                                 const CategoryTable& cats,
                                                 const VpqOptions& opts = {});

// Streaming form used by vpq(): per-video partial accumulators that reduce
// deterministically, per_window aligned with the `windows` argument.
struct VpqClassAccumulator {
  KahanSum iou;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct VideoVpqStats {
  std::vector<std::map<std::int32_t, VpqClassAccumulator>> per_window;
};

VideoVpqStats compute_video_vpq_stats(const VideoPanopticSequence& gt,
                                      const VideoPanopticSequence& pred,
                                      std::span<const int> windows, const CategoryTable& cats,
                                      const VpqOptions& opts);

// Merges per-video stats (already sorted by video id) into the final report.
VpqReport finalize_vpq(std::span<const VideoVpqStats> per_video_stats,
                       std::span<const int> windows);

// Full evaluation over paired sets. Videos are matched by video_id; the id
// sets must be equal and non-empty.
VpqReport vpq(std::span<const VideoPanopticSequence> gt_set,
              std::span<const VideoPanopticSequence> pred_set, std::span<const int> windows,
              const CategoryTable& cats, const VpqOptions& opts = {});

// Arithmetic mean of per-window scores (the leaderboard's overall score).
double aggregate_vpq(std::span<const double> window_scores);

}  // namespace vipseval

#endif  // VIPSEVAL_METRICS_VPQ_HPP
