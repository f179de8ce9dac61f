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

#include "vipseval/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "vipseval/error.hpp"

namespace vipseval {

LogitVolume average_softmax(std::span<const LogitVolume> sources,
                            std::span<const double> weights) {
  if (sources.empty()) throw_usage("average_softmax requires at least one source");
  const LogitVolume& first = sources.front();
  for (const LogitVolume& source : sources) {
    if (source.frames() != first.frames() || source.height() != first.height() ||
        source.width() != first.width())
      throw_data("logit sources disagree on dimensions");
    if (source.class_index() != first.class_index())
      throw_data("logit sources disagree on the class index");
  }
  std::vector<double> w(sources.size(), 1.0);
  if (!weights.empty()) {
    if (weights.size() != sources.size())
      throw_usage("got ", weights.size(), " weights for ", sources.size(), " sources");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0)) throw_usage("source weights must be nonnegative");
      w[i] = weights[i];
      total += weights[i];
    }
    if (total <= 0.0) throw_usage("source weights must not all be zero");
  }
  const double weight_sum = [&] {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }();

  const int classes = first.classes();
  const std::size_t pixels =
      static_cast<std::size_t>(first.frames()) * first.height() * first.width();
  std::vector<float> out(pixels * classes);
  std::vector<double> mean(classes);
  std::vector<double> contrib(sources.size());

  for (std::size_t px = 0; px < pixels; ++px) {
    const std::size_t base = px * classes;
    for (int c = 0; c < classes; ++c) {
      // Summing the weighted contributions in sorted order makes the mean
      // (and so the output) independent of source order.
      for (std::size_t s = 0; s < sources.size(); ++s)
        contrib[s] = w[s] * static_cast<double>(sources[s].values()[base + c]);
      std::sort(contrib.begin(), contrib.end());
      double sum = 0.0;
      for (double v : contrib) sum += v;
      mean[c] = sum / weight_sum;
    }
    double max_logit = mean[0];
    for (int c = 1; c < classes; ++c) max_logit = std::max(max_logit, mean[c]);
    double normalizer = 0.0;
    for (int c = 0; c < classes; ++c) {
      mean[c] = std::exp(mean[c] - max_logit);
      normalizer += mean[c];
    }
    for (int c = 0; c < classes; ++c)
      out[base + c] = static_cast<float>(mean[c] / normalizer);
  }
  return LogitVolume::create(first.frames(), first.height(), first.width(), first.class_index(),
                             std::move(out));
}

LogitVolume select_classes(const LogitVolume& volume, std::span<const std::int32_t> class_ids) {
  if (class_ids.empty()) throw_usage("select_classes requires at least one class id");
  std::vector<int> positions;
  positions.reserve(class_ids.size());
  for (std::int32_t id : class_ids) {
    auto it = std::find(volume.class_index().begin(), volume.class_index().end(), id);
    if (it == volume.class_index().end())
      throw_data("class id ", id, " is not present in the logit volume");
    positions.push_back(static_cast<int>(it - volume.class_index().begin()));
  }
  const std::size_t pixels =
      static_cast<std::size_t>(volume.frames()) * volume.height() * volume.width();
  std::vector<float> out(pixels * class_ids.size());
  for (std::size_t px = 0; px < pixels; ++px) {
    const std::size_t src = px * volume.classes();
    const std::size_t dst = px * class_ids.size();
    for (std::size_t c = 0; c < positions.size(); ++c)
      out[dst + c] = volume.values()[src + positions[c]];
  }
  return LogitVolume::create(volume.frames(), volume.height(), volume.width(),
                             std::vector<std::int32_t>(class_ids.begin(), class_ids.end()),
                             std::move(out));
}

VideoPanopticSequence merge_panoptic(const LogitVolume& stuff_probs,
                                     const std::vector<std::vector<FrameInstanceMask>>& instances,
                                     const MergeParams& params, const CategoryTable& cats,
                                     const std::string& video_id) {
  for (std::int32_t id : stuff_probs.class_index())
    if (cats.is_thing(id))
      throw_data("merge_panoptic: class ", id, " in the stuff volume is a thing category");
  if (static_cast<int>(instances.size()) != stuff_probs.frames())
    throw_data("merge_panoptic: ", instances.size(), " instance frames for ",
               stuff_probs.frames(), " probability frames");
  if (!(params.overlap_keep >= 0.0 && params.overlap_keep <= 1.0))
    throw_usage("overlap_keep must lie in [0, 1]");
  if (params.min_area < 0) throw_usage("min_area must be >= 0");

  const int height = stuff_probs.height();
  const int width = stuff_probs.width();
  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  const int classes = stuff_probs.classes();

  std::uint32_t max_track_id = 0;
  std::map<std::uint32_t, std::int32_t> track_category;
  for (const auto& frame : instances) {
    for (const FrameInstanceMask& mask : frame) {
      if (mask.track_id == kVoidId) throw_data("merge_panoptic: track id 0 is reserved for void");
      if (!cats.contains(mask.category_id) || !cats.is_thing(mask.category_id))
        throw_data("merge_panoptic: track ", mask.track_id, " has non-thing category ",
                   mask.category_id);
      if (!(mask.confidence >= 0.0 && mask.confidence <= 1.0))
        throw_data("merge_panoptic: track ", mask.track_id, " confidence outside [0,1]");
      auto [it, inserted] = track_category.emplace(mask.track_id, mask.category_id);
      if (!inserted && it->second != mask.category_id)
        throw_data("merge_panoptic: track ", mask.track_id, " changes category across frames");
      max_track_id = std::max(max_track_id, mask.track_id);
      for (std::uint32_t px : mask.pixels)
        if (px >= pixels)
          throw_data("merge_panoptic: track ", mask.track_id, " has pixel index ", px,
                     " outside the ", height, "x", width, " frame");
    }
  }

  // Stuff segment ids live above every instance track id, one per stuff
  // class position.
  std::vector<std::uint32_t> stuff_segment_id(classes);
  for (int c = 0; c < classes; ++c)
    stuff_segment_id[c] = max_track_id + 1 + static_cast<std::uint32_t>(c);

  std::map<std::uint32_t, std::int32_t> segments;
  std::vector<IdRaster> frames;
  frames.reserve(instances.size());
  std::vector<std::int64_t> stuff_area(classes);

  for (int t = 0; t < stuff_probs.frames(); ++t) {
    IdRaster raster(height, width);

    std::vector<const FrameInstanceMask*> order;
    order.reserve(instances[t].size());
    for (const FrameInstanceMask& mask : instances[t]) order.push_back(&mask);
    std::stable_sort(order.begin(), order.end(),
                     [](const FrameInstanceMask* a, const FrameInstanceMask* b) {
                       if (a->confidence != b->confidence) return a->confidence > b->confidence;
                       return a->track_id < b->track_id;
                     });

    for (const FrameInstanceMask* mask : order) {
      if (mask->pixels.empty()) continue;
      std::vector<std::uint32_t> kept;
      kept.reserve(mask->pixels.size());
      for (std::uint32_t px : mask->pixels)
        if (raster.ids()[px] == kVoidId) kept.push_back(px);
      const double kept_fraction =
          static_cast<double>(kept.size()) / static_cast<double>(mask->pixels.size());
      if (kept_fraction < params.overlap_keep) continue;
      if (static_cast<std::int64_t>(kept.size()) < params.min_area) continue;
      if (kept.empty()) continue;
      for (std::uint32_t px : kept) raster.ids()[px] = mask->track_id;
      segments[mask->track_id] = mask->category_id;
    }

    // Remaining pixels: stuff argmax, ties to the lowest class position.
    std::fill(stuff_area.begin(), stuff_area.end(), 0);
    for (std::size_t px = 0; px < pixels; ++px) {
      if (raster.ids()[px] != kVoidId) continue;
      const float* scores = stuff_probs.values().data() +
                            (static_cast<std::size_t>(t) * pixels + px) * classes;
      int best = 0;
      for (int c = 1; c < classes; ++c)
        if (scores[c] > scores[best]) best = c;
      raster.ids()[px] = stuff_segment_id[best];
      ++stuff_area[best];
    }
    if (params.min_area > 0) {
      for (int c = 0; c < classes; ++c) {
        if (stuff_area[c] == 0 || stuff_area[c] >= params.min_area) continue;
        for (std::size_t px = 0; px < pixels; ++px)
          if (raster.ids()[px] == stuff_segment_id[c]) raster.ids()[px] = kVoidId;
      }
    }
    for (int c = 0; c < classes; ++c)
      if (params.min_area <= 0 || stuff_area[c] >= params.min_area)
        if (stuff_area[c] > 0) segments[stuff_segment_id[c]] = stuff_probs.class_index()[c];

    frames.push_back(std::move(raster));
  }
  return VideoPanopticSequence::create(video_id, std::move(frames), std::move(segments), cats);
}

}  // namespace vipseval
