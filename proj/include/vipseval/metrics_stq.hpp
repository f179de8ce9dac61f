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
// Segmentation and Tracking Quality: STQ = sqrt(AQ * SQ).
//
// SQ collapses both sides to semantics and accumulates a pixel confusion
// matrix over every frame of every video (ground-truth-void pixels
// excluded); SQ is the mean IoU over classes present in ground truth or
// prediction. AQ works on whole-video thing tracks with class-agnostic
// matching: for a ground-truth track g,
//
//   AQ(g) = (1/|g|) * sum over pred thing tracks p with |p&g| > 0 of
//           |p&g| * |p&g| / |p|g|
//
// with pixel sets taken over the full video and prediction pixels on
// ground-truth void excluded; AQ is the mean of AQ(g) over all ground-truth
// thing tracks, pooled across videos. A dataset with no ground-truth thing
// track has undefined AQ and STQ (reported as absent).

#ifndef VIPSEVAL_METRICS_STQ_HPP
#define VIPSEVAL_METRICS_STQ_HPP

#include <span>
#include <vector>

#include "vipseval/core.hpp"

namespace vipseval {

struct StqOptions {
  int threads = 1;
};

struct SqResult {
  double sq = 0.0;
  std::vector<ClassIou> per_class;
};

struct AqResult {
  std::optional<double> aq;
  std::vector<TrackAq> per_track;
};

SqResult sq(std::span<const VideoPanopticSequence> gt_set,
            std::span<const VideoPanopticSequence> pred_set, const CategoryTable& cats,
            const StqOptions& opts = {});

AqResult aq(std::span<const VideoPanopticSequence> gt_set,
            std::span<const VideoPanopticSequence> pred_set, const CategoryTable& cats,
            const StqOptions& opts = {});

StqReport stq(std::span<const VideoPanopticSequence> gt_set,
              std::span<const VideoPanopticSequence> pred_set, const CategoryTable& cats,
              const StqOptions& opts = {});

}  // namespace vipseval

#endif  // VIPSEVAL_METRICS_STQ_HPP
