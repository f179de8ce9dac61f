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
// Query-based mask decoding: each segmentation target is a learned vector
// whose inner product with per-pixel features scores its mask.

#ifndef VIPSEVAL_QUERYDECODE_HPP
#define VIPSEVAL_QUERYDECODE_HPP

#include <string>
#include <vector>

#include "vipseval/core.hpp"

namespace vipseval {

enum class QueryKind { kSemanticClass, kInstance };

struct QueryMeta {
  QueryKind kind = QueryKind::kSemanticClass;
  std::int32_t category_id = 0;
};

// N queries x D dims, finite values, one metadata record per query.
class QueryMatrix {
 public:
  static QueryMatrix create(int queries, int dims, std::vector<float> values,
                            std::vector<QueryMeta> meta);

  int queries() const { return queries_; }
  int dims() const { return dims_; }
  const std::vector<float>& values() const { return values_; }
  const float* row(int n) const { return values_.data() + static_cast<std::size_t>(n) * dims_; }
  const std::vector<QueryMeta>& meta() const { return meta_; }

 private:
  QueryMatrix() = default;
  int queries_ = 0, dims_ = 0;
  std::vector<float> values_;
  std::vector<QueryMeta> meta_;
};

// T x H x W x D finite values.
class FeatureVolume {
 public:
  static FeatureVolume create(int t, int h, int w, int dims, std::vector<float> values);

  int frames() const { return t_; }
  int height() const { return h_; }
  int width() const { return w_; }
  int dims() const { return d_; }
  const std::vector<float>& values() const { return values_; }

 private:
  FeatureVolume() = default;
  int t_ = 0, h_ = 0, w_ = 0, d_ = 0;
  std::vector<float> values_;
};

// T x H x W of assigned query indexes; kUnassigned marks pixels whose best
// score fell below the threshold.
struct AssignmentVolume {
  static constexpr std::int32_t kUnassigned = -1;
  int frames = 0, height = 0, width = 0;
  std::vector<std::int32_t> indexes;
};

struct DecodeOptions {
  double threshold = 0.0;
  // L2-normalize query rows and feature vectors before the inner product
  // (zero vectors are left untouched).
  bool normalize = false;
};

// score(n, t, h, w) = <q_n, f_thw>; each pixel takes the argmax query when
// the best score reaches the threshold, ties to the lowest query index.
AssignmentVolume decode_masks(const QueryMatrix& queries, const FeatureVolume& features,
                              const DecodeOptions& opts = {});

// Instance queries become thing tracks (segment id = query index + 1, since
// id 0 is the void sentinel); semantic-class queries of one category
// collapse to a single segment with an id above every instance id. Only
// queries that won at least one pixel appear in the segment map.
VideoPanopticSequence assignment_to_panoptic(const AssignmentVolume& assignment,
                                             const QueryMatrix& queries,
                                             const CategoryTable& cats,
                                             const std::string& video_id);

}  // namespace vipseval

#endif  // VIPSEVAL_QUERYDECODE_HPP
