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

#include "vipseval/querydecode.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vipseval/error.hpp"

namespace vipseval {

QueryMatrix QueryMatrix::create(int queries, int dims, std::vector<float> values,
                                std::vector<QueryMeta> meta) {
  if (queries < 1 || dims < 1)
    throw_data("query matrix must be at least 1x1, got ", queries, "x", dims);
  if (values.size() != static_cast<std::size_t>(queries) * dims)
    throw_data("query matrix has ", values.size(), " values, expected ", queries, "x", dims);
  if (meta.size() != static_cast<std::size_t>(queries))
    throw_data("query matrix has ", meta.size(), " metadata records for ", queries, " queries");
  for (float v : values)
    if (!std::isfinite(v)) throw_data("non-finite query value");
  QueryMatrix q;
  q.queries_ = queries;
  q.dims_ = dims;
  q.values_ = std::move(values);
  q.meta_ = std::move(meta);
  return q;
}

FeatureVolume FeatureVolume::create(int t, int h, int w, int dims, std::vector<float> values) {
  if (t < 1 || h < 1 || w < 1 || dims < 1)
    throw_data("feature volume dimensions must be >= 1, got ", t, "x", h, "x", w, "x", dims);
  if (values.size() != static_cast<std::size_t>(t) * h * w * dims)
    throw_data("feature volume has ", values.size(), " values, expected ", t, "x", h, "x", w, "x",
               dims);
  for (float v : values)
    if (!std::isfinite(v)) throw_data("non-finite feature value");
  FeatureVolume f;
  f.t_ = t;
  f.h_ = h;
  f.w_ = w;
  f.d_ = dims;
  f.values_ = std::move(values);
  return f;
}

namespace {

std::vector<float> normalized_rows(const float* data, std::size_t rows, int dims) {
  std::vector<float> out(data, data + rows * dims);
  for (std::size_t r = 0; r < rows; ++r) {
    float* row = out.data() + r * dims;
    double norm_sq = 0.0;
    for (int d = 0; d < dims; ++d) norm_sq += static_cast<double>(row[d]) * row[d];
    if (norm_sq <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int d = 0; d < dims; ++d) row[d] = static_cast<float>(row[d] * inv);
  }
  return out;
}

}  // namespace

AssignmentVolume decode_masks(const QueryMatrix& queries, const FeatureVolume& features,
                              const DecodeOptions& opts) {
  if (queries.dims() != features.dims())
    throw_usage("query dimension ", queries.dims(), " does not match feature dimension ",
                features.dims());

  const int dims = queries.dims();
  const std::size_t pixels =
      static_cast<std::size_t>(features.frames()) * features.height() * features.width();

  const float* query_data = queries.values().data();
  const float* feature_data = features.values().data();
  std::vector<float> query_store, feature_store;
  if (opts.normalize) {
    query_store = normalized_rows(query_data, static_cast<std::size_t>(queries.queries()), dims);
    feature_store = normalized_rows(feature_data, pixels, dims);
    query_data = query_store.data();
    feature_data = feature_store.data();
  }

  AssignmentVolume out;
  out.frames = features.frames();
  out.height = features.height();
  out.width = features.width();
  out.indexes.assign(pixels, AssignmentVolume::kUnassigned);

  for (std::size_t px = 0; px < pixels; ++px) {
    const float* f = feature_data + px * dims;
    double best_score = 0.0;
    int best = AssignmentVolume::kUnassigned;
    for (int n = 0; n < queries.queries(); ++n) {
      const float* q = query_data + static_cast<std::size_t>(n) * dims;
      double score = 0.0;
      for (int d = 0; d < dims; ++d) score += static_cast<double>(q[d]) * f[d];
      if (best == AssignmentVolume::kUnassigned || score > best_score) {
        best_score = score;
        best = n;
      }
    }
    if (best_score >= opts.threshold) out.indexes[px] = best;
  }
  return out;
}

VideoPanopticSequence assignment_to_panoptic(const AssignmentVolume& assignment,
                                             const QueryMatrix& queries,
                                             const CategoryTable& cats,
                                             const std::string& video_id) {
  if (assignment.indexes.size() != static_cast<std::size_t>(assignment.frames) *
                                       assignment.height * assignment.width)
    throw_data("assignment volume buffer does not match its dimensions");

  for (const QueryMeta& meta : queries.meta()) {
    const Category& cat = cats.at(meta.category_id);
    if (meta.kind == QueryKind::kInstance && !cat.is_thing)
      throw_data("instance query with stuff category ", meta.category_id);
  }

  // Semantic queries of one category share a segment id above the
  // per-instance ids (query index + 1).
  std::map<std::int32_t, std::uint32_t> semantic_segment;
  std::uint32_t next_semantic = static_cast<std::uint32_t>(queries.queries()) + 1;
  for (const QueryMeta& meta : queries.meta()) {
    if (meta.kind != QueryKind::kSemanticClass) continue;
    if (semantic_segment.emplace(meta.category_id, next_semantic).second) ++next_semantic;
  }

  std::map<std::uint32_t, std::int32_t> segments;
  std::vector<IdRaster> frames;
  frames.reserve(static_cast<std::size_t>(assignment.frames));
  const std::size_t frame_pixels =
      static_cast<std::size_t>(assignment.height) * assignment.width;
  for (int t = 0; t < assignment.frames; ++t) {
    IdRaster raster(assignment.height, assignment.width);
    for (std::size_t px = 0; px < frame_pixels; ++px) {
      const std::int32_t n = assignment.indexes[t * frame_pixels + px];
      if (n == AssignmentVolume::kUnassigned) continue;
      if (n < 0 || n >= queries.queries())
        throw_data("assignment references query ", n, " outside the matrix");
      const QueryMeta& meta = queries.meta()[n];
      std::uint32_t id;
      if (meta.kind == QueryKind::kInstance) {
        id = static_cast<std::uint32_t>(n) + 1;
      } else {
        id = semantic_segment.at(meta.category_id);
      }
      raster.ids()[px] = id;
      segments.emplace(id, meta.category_id);
    }
    frames.push_back(std::move(raster));
  }
  return VideoPanopticSequence::create(video_id, std::move(frames), std::move(segments), cats);
}

}  // namespace vipseval
