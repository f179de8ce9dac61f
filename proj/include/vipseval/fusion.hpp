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

#ifndef VIPSEVAL_FUSION_HPP
#define VIPSEVAL_FUSION_HPP

#include <span>
#include <string>
#include <vector>

#include "vipseval/core.hpp"
#include "vipseval/dataset_io.hpp"

namespace vipseval {

// Weighted mean of the source logits followed by a per-pixel softmax
// (max-subtracted). Sources must share dims and class index; weights, when
// given, must be nonnegative with a positive sum (absent = uniform). Each
// pixel of the result is a probability distribution over the class index,
// and the result is independent of source order.
LogitVolume average_softmax(std::span<const LogitVolume> sources,
                            std::span<const double> weights = {});

// Returns the sub-volume holding only `class_ids` (in the given order).
LogitVolume select_classes(const LogitVolume& volume, std::span<const std::int32_t> class_ids);

// One instance mask within a single frame. Pixels are linear row-major
// indexes into the frame.
struct FrameInstanceMask {
  std::uint32_t track_id = 0;
  std::int32_t category_id = 0;
  double confidence = 1.0;
  std::vector<std::uint32_t> pixels;
};

struct MergeParams {
  std::int64_t min_area = 0;     // per-frame minimum surviving area
  double overlap_keep = 0.5;     // minimum kept fraction of a mask
};

// Confidence-ordered hard assignment, per frame: instances are placed in
// descending confidence (ties by ascending track id); a later instance
// keeps only pixels not yet taken and survives only if the kept fraction is
// >= overlap_keep and the kept area >= min_area. Remaining pixels take the
// argmax over the stuff probabilities (ties by lowest class position), and
// stuff regions below min_area in a frame are dropped to void. Stuff
// segment ids are allocated above the largest instance track id.
VideoPanopticSequence merge_panoptic(const LogitVolume& stuff_probs,
                                     const std::vector<std::vector<FrameInstanceMask>>& instances,
                                     const MergeParams& params, const CategoryTable& cats,
                                     const std::string& video_id);

}  // namespace vipseval

#endif  // VIPSEVAL_FUSION_HPP
