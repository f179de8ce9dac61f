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

#ifndef VIPSEVAL_CONTINGENCY_HPP
#define VIPSEVAL_CONTINGENCY_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "vipseval/core.hpp"

namespace vipseval::internal {

// Per-frame sparse (gt id, pred id) pixel-count tables for one video pair,
// over dense lanes: lane 0 is void, lanes 1..n are the video's segment ids
// in ascending order. Entry keys are gi * pred_lanes + pj, sorted. Both the
// VPQ engine (per-clip sums) and the STQ engine (whole-video sums) consume
// this.
struct VideoContingency {
  std::vector<std::uint32_t> gt_ids;    // dense -> segment id, [0] = void
  std::vector<std::uint32_t> pred_ids;  // dense -> segment id, [0] = void
  std::vector<std::int32_t> gt_cat;     // dense -> category id, [0] = 0
  std::vector<std::int32_t> pred_cat;   // dense -> category id, [0] = 0
  std::size_t pred_lanes = 0;           // pred_ids.size()
  std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>> frames;
};

// Requires equal dimensions and frame counts (throws Error(kData) naming
// the video otherwise).
VideoContingency build_contingency(const VideoPanopticSequence& gt,
                                   const VideoPanopticSequence& pred);

// Sums the per-frame tables over frames [t0, t1) into a sorted
// (key, count) vector, reusing `scratch` storage.
void merge_frames(const VideoContingency& cont, int t0, int t1,
                  std::vector<std::pair<std::uint64_t, std::int64_t>>& scratch);

}  // namespace vipseval::internal

#endif  // VIPSEVAL_CONTINGENCY_HPP
