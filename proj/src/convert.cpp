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

#include "vipseval/convert.hpp"

#include <unordered_map>

namespace vipseval {

namespace {

// Per-pixel map application with a one-entry run cache; rasters are
// region-coherent so the cache hits almost always.
template <class Fn>
IdRaster map_raster(const IdRaster& raster, Fn&& fn) {
  IdRaster out(raster.height(), raster.width());
  const auto& src = raster.ids();
  auto& dst = out.ids();
  std::uint32_t prev_in = kVoidId;
  std::uint32_t prev_out = kVoidId;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] != prev_in) {
      prev_in = src[i];
      prev_out = fn(prev_in);
    }
    dst[i] = prev_out;
  }
  return out;
}

}  // namespace

SemanticSequence to_semantic(const VideoPanopticSequence& seq, const CategoryTable& cats) {
  const auto& segments = seq.segments();
  std::vector<IdRaster> frames;
  frames.reserve(seq.frames().size());
  for (const IdRaster& raster : seq.frames()) {
    frames.push_back(map_raster(raster, [&](std::uint32_t id) -> std::uint32_t {
      if (id == kVoidId) return kVoidId;
      return static_cast<std::uint32_t>(segments.at(id));
    }));
  }
  return SemanticSequence::create(seq.video_id(), std::move(frames), cats);
}

InstanceSequence to_instance(const VideoPanopticSequence& seq, const CategoryTable& cats) {
  const auto& segments = seq.segments();
  std::unordered_map<std::uint32_t, bool> keep;
  std::map<std::uint32_t, std::int32_t> instances;
  for (const auto& [id, category_id] : segments) {
    bool is_thing = cats.is_thing(category_id);
    keep.emplace(id, is_thing);
    if (is_thing) instances.emplace(id, category_id);
  }
  std::vector<IdRaster> frames;
  frames.reserve(seq.frames().size());
  for (const IdRaster& raster : seq.frames()) {
    frames.push_back(map_raster(raster, [&](std::uint32_t id) -> std::uint32_t {
      if (id == kVoidId || !keep.at(id)) return kVoidId;
      return id;
    }));
  }
  return InstanceSequence::create(seq.video_id(), std::move(frames), std::move(instances), cats);
}

}  // namespace vipseval
