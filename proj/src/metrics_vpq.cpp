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

#include "vipseval/metrics_vpq.hpp"

#include <algorithm>
#include <numeric>

#include "contingency.hpp"
#include "vipseval/error.hpp"

namespace vipseval {

namespace {

using internal::VideoContingency;

struct ClipScratch {
  std::vector<std::pair<std::uint64_t, std::int64_t>> entries;
  std::vector<std::int64_t> gt_area;
  std::vector<std::int64_t> pred_area;
  std::vector<std::int64_t> pred_void;
  std::vector<std::int32_t> gt_match;  // dense gt lane -> dense pred lane, -1 unmatched
  std::vector<std::int32_t> pred_match;
  std::vector<double> gt_match_iou;
};

// One clip: area aggregates, unique matching (2*inter > union in exact
// integers, so the 0.5 boundary never depends on float rounding), then
// per-class accumulation in ascending gt id / pred id order. That order is
// invariant under prediction-id renaming on the float side because each
// true positive is keyed by its gt tube.
void accumulate_clip(const VideoContingency& cont, int t0, int t1, const VpqOptions& opts,
                     ClipScratch& scratch,
                     std::map<std::int32_t, VpqClassAccumulator>& per_class) {
  internal::merge_frames(cont, t0, t1, scratch.entries);

  const std::size_t gt_lanes = cont.gt_ids.size();
  const std::size_t pred_lanes = cont.pred_lanes;
  scratch.gt_area.assign(gt_lanes, 0);
  scratch.pred_area.assign(pred_lanes, 0);
  scratch.pred_void.assign(pred_lanes, 0);
  scratch.gt_match.assign(gt_lanes, -1);
  scratch.pred_match.assign(pred_lanes, -1);
  scratch.gt_match_iou.assign(gt_lanes, 0.0);

  for (const auto& [key, count] : scratch.entries) {
    const std::size_t gi = key / pred_lanes;
    const std::size_t pj = key % pred_lanes;
    scratch.gt_area[gi] += count;
    scratch.pred_area[pj] += count;
    if (gi == 0) scratch.pred_void[pj] += count;
  }

  for (const auto& [key, inter] : scratch.entries) {
    const std::size_t gi = key / pred_lanes;
    const std::size_t pj = key % pred_lanes;
    if (gi == 0 || pj == 0) continue;
    if (cont.gt_cat[gi] != cont.pred_cat[pj]) continue;
    const std::int64_t pred_valid = scratch.pred_area[pj] - scratch.pred_void[pj];
    const std::int64_t union_count = scratch.gt_area[gi] + pred_valid - inter;
    if (2 * inter > union_count) {
      if (scratch.gt_match[gi] != -1 || scratch.pred_match[pj] != -1)
        throw_internal("tube matching uniqueness violated for video segment pair (",
                       cont.gt_ids[gi], ", ", cont.pred_ids[pj], ")");
      scratch.gt_match[gi] = static_cast<std::int32_t>(pj);
      scratch.pred_match[pj] = static_cast<std::int32_t>(gi);
      scratch.gt_match_iou[gi] =
          static_cast<double>(inter) / static_cast<double>(union_count);
    }
  }

  for (std::size_t gi = 1; gi < gt_lanes; ++gi) {
    if (scratch.gt_area[gi] == 0) continue;  // no tube in this clip
    VpqClassAccumulator& acc = per_class[cont.gt_cat[gi]];
    if (scratch.gt_match[gi] != -1) {
      acc.iou.add(scratch.gt_match_iou[gi]);
      ++acc.tp;
    } else {
      ++acc.fn;
    }
  }
  for (std::size_t pj = 1; pj < pred_lanes; ++pj) {
    if (scratch.pred_area[pj] == 0 || scratch.pred_match[pj] != -1) continue;
    const bool mostly_void = 2 * scratch.pred_void[pj] > scratch.pred_area[pj];
    if (mostly_void && !opts.count_void_pred_as_fp) continue;
    ++per_class[cont.pred_cat[pj]].fp;
  }
}

void check_windows(std::span<const int> windows) {
  if (windows.empty()) throw_usage("at least one window size is required");
  for (int k : windows)
    if (k < 1) throw_usage("window sizes must be >= 1, got ", k);
}

}  // namespace

double tube_iou(const SegmentTube& pred, const SegmentTube& gt,
                const std::vector<IdRaster>* gt_frames) {
  if (pred.start_frame != gt.start_frame || pred.frame_pixels.size() != gt.frame_pixels.size())
    throw_usage("tube_iou requires tubes over the same clip span");

  std::int64_t intersection = 0;
  std::int64_t union_count = 0;
  for (std::size_t i = 0; i < gt.frame_pixels.size(); ++i) {
    const int frame = gt.start_frame + static_cast<int>(i);
    const std::vector<std::uint32_t>* void_source = nullptr;
    if (gt_frames) {
      if (frame < 0 || frame >= static_cast<int>(gt_frames->size()))
        throw_usage("tube span exceeds the provided ground-truth frames");
      void_source = &(*gt_frames)[frame].ids();
    }
    auto is_void = [&](std::uint32_t px) {
      return void_source && (*void_source)[px] == kVoidId;
    };

    const auto& p = pred.frame_pixels[i];
    const auto& g = gt.frame_pixels[i];
    std::size_t a = 0, b = 0;
    while (a < p.size() || b < g.size()) {
      std::uint32_t px;
      bool in_p = false, in_g = false;
      if (a < p.size() && (b >= g.size() || p[a] <= g[b])) {
        px = p[a];
        in_p = true;
        in_g = b < g.size() && g[b] == p[a];
      } else {
        px = g[b];
        in_g = true;
      }
      if (in_p) ++a;
      if (in_g) ++b;
      if (is_void(px)) continue;
      ++union_count;
      if (in_p && in_g) ++intersection;
    }
  }
  if (union_count == 0) return 0.0;
  return static_cast<double>(intersection) / static_cast<double>(union_count);
}

VideoVpqStats compute_video_vpq_stats(const VideoPanopticSequence& gt,
                                      const VideoPanopticSequence& pred,
                                      std::span<const int> windows, const CategoryTable& cats,
                                      const VpqOptions& opts) {
  check_windows(windows);
  for (const auto& [id, category_id] : gt.segments()) cats.at(category_id);
  for (const auto& [id, category_id] : pred.segments()) cats.at(category_id);

  const VideoContingency cont = internal::build_contingency(gt, pred);
  const int frame_count = gt.frame_count();

  VideoVpqStats stats;
  stats.per_window.resize(windows.size());
  ClipScratch scratch;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const int k = std::min(windows[wi], frame_count);  // short videos: one whole-video clip
    for (int t0 = 0; t0 + k <= frame_count; ++t0)
      accumulate_clip(cont, t0, t0 + k, opts, scratch, stats.per_window[wi]);
  }
  return stats;
}

std::map<std::int32_t, VpqClassStats> vpq_window(const VideoPanopticSequence& gt,
                                                 const VideoPanopticSequence& pred, int window,
                                                 const CategoryTable& cats,
                                                 const VpqOptions& opts) {
  const int windows[1] = {window};
  VideoVpqStats stats = compute_video_vpq_stats(gt, pred, windows, cats, opts);
  std::map<std::int32_t, VpqClassStats> out;
  for (const auto& [category_id, acc] : stats.per_window[0])
    out.emplace(category_id, VpqClassStats{acc.iou.value(), acc.tp, acc.fp, acc.fn});
  return out;
}

VpqReport finalize_vpq(std::span<const VideoVpqStats> per_video_stats,
                       std::span<const int> windows) {
  check_windows(windows);
  VpqReport report;
  std::vector<double> window_scores;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    std::map<std::int32_t, VpqClassAccumulator> combined;
    for (const VideoVpqStats& video : per_video_stats) {
      if (video.per_window.size() != windows.size())
        throw_internal("per-video stats do not align with the window list");
      for (const auto& [category_id, acc] : video.per_window[wi]) {
        VpqClassAccumulator& dst = combined[category_id];
        dst.iou.merge(acc.iou);
        dst.tp += acc.tp;
        dst.fp += acc.fp;
        dst.fn += acc.fn;
      }
    }

    VpqWindowResult result;
    result.window = windows[wi];
    double score_sum = 0.0;
    for (const auto& [category_id, acc] : combined) {
      VpqClassStats stats{acc.iou.value(), acc.tp, acc.fp, acc.fn};
      if (auto quality = stats.quality()) {
        score_sum += *quality;
        ++result.classes_evaluated;
      }
      result.per_class.emplace(category_id, stats);
    }
    result.vpq = result.classes_evaluated > 0
                     ? score_sum / static_cast<double>(result.classes_evaluated)
                     : 0.0;
    window_scores.push_back(result.vpq);
    report.windows.push_back(std::move(result));
  }
  report.overall_vpq = aggregate_vpq(window_scores);
  return report;
}

VpqReport vpq(std::span<const VideoPanopticSequence> gt_set,
              std::span<const VideoPanopticSequence> pred_set, std::span<const int> windows,
              const CategoryTable& cats, const VpqOptions& opts) {
  check_windows(windows);
  if (gt_set.empty()) throw_data("no ground-truth videos to evaluate");

  std::map<std::string, const VideoPanopticSequence*> gt_by_id, pred_by_id;
  for (const auto& seq : gt_set)
    if (!gt_by_id.emplace(seq.video_id(), &seq).second)
      throw_data("duplicate ground-truth video id '", seq.video_id(), "'");
  for (const auto& seq : pred_set)
    if (!pred_by_id.emplace(seq.video_id(), &seq).second)
      throw_data("duplicate prediction video id '", seq.video_id(), "'");
  for (const auto& [id, seq] : gt_by_id)
    if (pred_by_id.count(id) == 0)
      throw_data("video id mismatch: '", id, "' has no prediction");
  for (const auto& [id, seq] : pred_by_id)
    if (gt_by_id.count(id) == 0)
      throw_data("video id mismatch: '", id, "' has no ground truth");

  // gt_by_id is ordered by video id; slot-indexed tasks + in-order reduce
  // keep the result independent of worker count and manifest order.
  std::vector<std::pair<const VideoPanopticSequence*, const VideoPanopticSequence*>> pairs;
  pairs.reserve(gt_by_id.size());
  for (const auto& [id, seq] : gt_by_id) pairs.emplace_back(seq, pred_by_id.at(id));

  std::vector<VideoVpqStats> per_video(pairs.size());
  parallel_for(pairs.size(), opts.threads, [&](std::size_t i) {
    per_video[i] = compute_video_vpq_stats(*pairs[i].first, *pairs[i].second, windows, cats, opts);
  });
  return finalize_vpq(per_video, windows);
}

double aggregate_vpq(std::span<const double> window_scores) {
  if (window_scores.empty()) throw_usage("aggregate_vpq requires at least one window score");
  double sum = 0.0;
  for (double score : window_scores) sum += score;
  return sum / static_cast<double>(window_scores.size());
}

}  // namespace vipseval
