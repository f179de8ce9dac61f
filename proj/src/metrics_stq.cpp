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

#include "vipseval/metrics_stq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "contingency.hpp"
#include "vipseval/error.hpp"
#include "vipseval/threading.hpp"

namespace vipseval {

namespace {

using internal::VideoContingency;

struct VideoStqPartial {
  // Semantic confusion counts keyed by (gt category, pred category);
  // pred category 0 stands for prediction void. Ground-truth-void pixels
  // never enter.
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> confusion;
  std::vector<TrackAq> tracks;  // ascending track id within the video
};

VideoStqPartial compute_video_stq(const VideoPanopticSequence& gt,
                                  const VideoPanopticSequence& pred,
                                  const CategoryTable& cats) {
  for (const auto& [id, category_id] : gt.segments()) cats.at(category_id);
  for (const auto& [id, category_id] : pred.segments()) cats.at(category_id);

  const VideoContingency cont = internal::build_contingency(gt, pred);
  std::vector<std::pair<std::uint64_t, std::int64_t>> whole_video;
  internal::merge_frames(cont, 0, gt.frame_count(), whole_video);

  const std::size_t gt_lanes = cont.gt_ids.size();
  const std::size_t pred_lanes = cont.pred_lanes;

  std::vector<std::int64_t> gt_area(gt_lanes, 0);
  std::vector<std::int64_t> pred_area(pred_lanes, 0);
  std::vector<std::int64_t> pred_void(pred_lanes, 0);
  for (const auto& [key, count] : whole_video) {
    const std::size_t gi = key / pred_lanes;
    const std::size_t pj = key % pred_lanes;
    gt_area[gi] += count;
    pred_area[pj] += count;
    if (gi == 0) pred_void[pj] += count;
  }

  VideoStqPartial partial;
  for (const auto& [key, count] : whole_video) {
    const std::size_t gi = key / pred_lanes;
    if (gi == 0) continue;  // gt void excluded everywhere
    const std::size_t pj = key % pred_lanes;
    partial.confusion[{cont.gt_cat[gi], cont.pred_cat[pj]}] += count;
  }

  std::vector<bool> gt_thing(gt_lanes, false);
  std::vector<bool> pred_thing(pred_lanes, false);
  for (std::size_t gi = 1; gi < gt_lanes; ++gi) gt_thing[gi] = cats.is_thing(cont.gt_cat[gi]);
  for (std::size_t pj = 1; pj < pred_lanes; ++pj)
    pred_thing[pj] = cats.is_thing(cont.pred_cat[pj]);

  // Per ground-truth thing track: overlap terms against prediction thing
  // tracks. Terms are sorted by their exact integer (intersection, union)
  // pair before the float sum, so renaming prediction ids cannot reorder
  // the arithmetic.
  struct Term {
    std::int64_t inter;
    std::int64_t uni;
  };
  std::map<std::size_t, std::vector<Term>> terms_by_track;
  for (const auto& [key, inter] : whole_video) {
    const std::size_t gi = key / pred_lanes;
    const std::size_t pj = key % pred_lanes;
    if (gi == 0 || pj == 0 || !gt_thing[gi] || !pred_thing[pj]) continue;
    const std::int64_t pred_valid = pred_area[pj] - pred_void[pj];
    terms_by_track[gi].push_back(Term{inter, gt_area[gi] + pred_valid - inter});
  }
  for (std::size_t gi = 1; gi < gt_lanes; ++gi) {
    if (!gt_thing[gi] || gt_area[gi] == 0) continue;
    double sum = 0.0;
    if (auto it = terms_by_track.find(gi); it != terms_by_track.end()) {
      std::sort(it->second.begin(), it->second.end(), [](const Term& a, const Term& b) {
        return a.inter != b.inter ? a.inter < b.inter : a.uni < b.uni;
      });
      for (const Term& term : it->second)
        sum += static_cast<double>(term.inter) * static_cast<double>(term.inter) /
               static_cast<double>(term.uni);
    }
    partial.tracks.push_back(
        TrackAq{gt.video_id(), cont.gt_ids[gi], sum / static_cast<double>(gt_area[gi])});
  }
  return partial;
}

std::vector<VideoStqPartial> compute_partials(std::span<const VideoPanopticSequence> gt_set,
                                              std::span<const VideoPanopticSequence> pred_set,
                                              const CategoryTable& cats,
                                              const StqOptions& opts) {
  if (gt_set.empty()) throw_data("no ground-truth videos to evaluate");
  std::map<std::string, const VideoPanopticSequence*> gt_by_id, pred_by_id;
  for (const auto& seq : gt_set)
    if (!gt_by_id.emplace(seq.video_id(), &seq).second)
      throw_data("duplicate ground-truth video id '", seq.video_id(), "'");
  for (const auto& seq : pred_set)
    if (!pred_by_id.emplace(seq.video_id(), &seq).second)
      throw_data("duplicate prediction video id '", seq.video_id(), "'");
  for (const auto& [id, seq] : gt_by_id)
    if (pred_by_id.count(id) == 0) throw_data("video id mismatch: '", id, "' has no prediction");
  for (const auto& [id, seq] : pred_by_id)
    if (gt_by_id.count(id) == 0) throw_data("video id mismatch: '", id, "' has no ground truth");

  std::vector<std::pair<const VideoPanopticSequence*, const VideoPanopticSequence*>> pairs;
  pairs.reserve(gt_by_id.size());
  for (const auto& [id, seq] : gt_by_id) pairs.emplace_back(seq, pred_by_id.at(id));

  std::vector<VideoStqPartial> partials(pairs.size());
  parallel_for(pairs.size(), opts.threads, [&](std::size_t i) {
    partials[i] = compute_video_stq(*pairs[i].first, *pairs[i].second, cats);
  });
  return partials;
}

SqResult sq_from_partials(std::span<const VideoStqPartial> partials) {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> confusion;
  for (const VideoStqPartial& partial : partials)
    for (const auto& [key, count] : partial.confusion) confusion[key] += count;

  std::map<std::int32_t, std::int64_t> row_sum, col_sum, diag;
  for (const auto& [key, count] : confusion) {
    const auto [gt_cat, pred_cat] = key;
    row_sum[gt_cat] += count;
    if (pred_cat != 0) col_sum[pred_cat] += count;
    if (gt_cat == pred_cat) diag[gt_cat] += count;
  }

  std::map<std::int32_t, std::int64_t> unions;
  for (const auto& [c, n] : row_sum) unions[c] += n;
  for (const auto& [c, n] : col_sum) unions[c] += n;

  SqResult result;
  double sum = 0.0;
  for (const auto& [c, total] : unions) {
    if (total <= 0) continue;  // class absent from both sides
    const std::int64_t inter = diag.count(c) ? diag.at(c) : 0;
    const std::int64_t uni = total - inter;
    const double iou = uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
    result.per_class.push_back(ClassIou{c, iou});
    sum += iou;
  }
  result.sq = result.per_class.empty() ? 0.0 : sum / static_cast<double>(result.per_class.size());
  return result;
}

AqResult aq_from_partials(std::span<const VideoStqPartial> partials) {
  AqResult result;
  double sum = 0.0;
  for (const VideoStqPartial& partial : partials) {
    for (const TrackAq& track : partial.tracks) {
      result.per_track.push_back(track);
      sum += track.aq;
    }
  }
  if (!result.per_track.empty())
    result.aq = sum / static_cast<double>(result.per_track.size());
  return result;
}

}  // namespace

SqResult sq(std::span<const VideoPanopticSequence> gt_set,
            std::span<const VideoPanopticSequence> pred_set, const CategoryTable& cats,
            const StqOptions& opts) {
  return sq_from_partials(compute_partials(gt_set, pred_set, cats, opts));
}

AqResult aq(std::span<const VideoPanopticSequence> gt_set,
            std::span<const VideoPanopticSequence> pred_set, const CategoryTable& cats,
            const StqOptions& opts) {
  return aq_from_partials(compute_partials(gt_set, pred_set, cats, opts));
}

StqReport stq(std::span<const VideoPanopticSequence> gt_set,
              std::span<const VideoPanopticSequence> pred_set, const CategoryTable& cats,
              const StqOptions& opts) {
  std::vector<VideoStqPartial> partials = compute_partials(gt_set, pred_set, cats, opts);
  SqResult sq_result = sq_from_partials(partials);
  AqResult aq_result = aq_from_partials(partials);

  StqReport report;
  report.sq = sq_result.sq;
  report.per_class_iou = std::move(sq_result.per_class);
  report.aq = aq_result.aq;
  report.per_track_aq = std::move(aq_result.per_track);
  if (report.aq) report.stq = std::sqrt(*report.aq * report.sq);
  return report;
}

}  // namespace vipseval
