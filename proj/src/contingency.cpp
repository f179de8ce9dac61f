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

#include "contingency.hpp"

#include <algorithm>
#include <unordered_map>

#include "vipseval/error.hpp"

namespace vipseval::internal {

namespace {

void fill_lanes(const VideoPanopticSequence& seq, std::vector<std::uint32_t>& ids,
                std::vector<std::int32_t>& cats,
                std::unordered_map<std::uint32_t, std::uint32_t>& dense) {
  ids.clear();
  cats.clear();
  ids.push_back(kVoidId);
  cats.push_back(0);
  dense.clear();
  dense.reserve(seq.segments().size() + 1);
  dense.emplace(kVoidId, 0);
  for (const auto& [id, category_id] : seq.segments()) {  // std::map: ascending ids
    dense.emplace(id, static_cast<std::uint32_t>(ids.size()));
    ids.push_back(id);
    cats.push_back(category_id);
  }
}

}  // namespace

VideoContingency build_contingency(const VideoPanopticSequence& gt,
                                   const VideoPanopticSequence& pred) {
  if (gt.height() != pred.height() || gt.width() != pred.width() ||
      gt.frame_count() != pred.frame_count()) {
    throw_data("dimension mismatch for video '", gt.video_id(), "': ground truth is ",
               gt.height(), "x", gt.width(), "x", gt.frame_count(), " frames, prediction is ",
               pred.height(), "x", pred.width(), "x", pred.frame_count(), " frames");
  }

  VideoContingency cont;
  std::unordered_map<std::uint32_t, std::uint32_t> gt_dense, pred_dense;
  fill_lanes(gt, cont.gt_ids, cont.gt_cat, gt_dense);
  fill_lanes(pred, cont.pred_ids, cont.pred_cat, pred_dense);
  cont.pred_lanes = cont.pred_ids.size();

  const int frame_count = gt.frame_count();
  cont.frames.resize(frame_count);
  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  for (int t = 0; t < frame_count; ++t) {
    counts.clear();
    const auto& gt_px = gt.frames()[t].ids();
    const auto& pred_px = pred.frames()[t].ids();
    // Rasters are region-coherent, so cache the previous pixel's pair and
    // flush runs in one update.
    std::uint32_t prev_g = gt_px[0];
    std::uint32_t prev_p = pred_px[0];
    std::uint64_t key = static_cast<std::uint64_t>(gt_dense.at(prev_g)) * cont.pred_lanes +
                        pred_dense.at(prev_p);
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < gt_px.size(); ++i) {
      if (gt_px[i] != prev_g || pred_px[i] != prev_p) {
        counts[key] += run;
        prev_g = gt_px[i];
        prev_p = pred_px[i];
        key = static_cast<std::uint64_t>(gt_dense.at(prev_g)) * cont.pred_lanes +
              pred_dense.at(prev_p);
        run = 0;
      }
      ++run;
    }
    counts[key] += run;

    auto& entries = cont.frames[t];
    entries.assign(counts.begin(), counts.end());
    std::sort(entries.begin(), entries.end());
  }
  return cont;
}

void merge_frames(const VideoContingency& cont, int t0, int t1,
                  std::vector<std::pair<std::uint64_t, std::int64_t>>& scratch) {
  scratch.clear();
  for (int t = t0; t < t1; ++t)
    for (const auto& [key, count] : cont.frames[t])
      scratch.emplace_back(key, static_cast<std::int64_t>(count));
  std::sort(scratch.begin(), scratch.end());
  std::size_t out = 0;
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    if (out > 0 && scratch[out - 1].first == scratch[i].first) {
      scratch[out - 1].second += scratch[i].second;
    } else {
      scratch[out++] = scratch[i];
    }
  }
  scratch.resize(out);
}

}  // namespace vipseval::internal
