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

#include "vipseval/core.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "vipseval/error.hpp"

namespace vipseval {

CategoryTable CategoryTable::create(std::vector<Category> entries) {
  if (entries.empty()) throw_data("category table: at least one entry required");
  std::sort(entries.begin(), entries.end(),
            [](const Category& a, const Category& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Category& c = entries[i];
    if (c.id < 1) throw_data("category table: id ", c.id, " must be >= 1 (0 is the void sentinel)");
    if (c.name.empty()) throw_data("category table: category ", c.id, " has an empty name");
    if (i > 0 && entries[i - 1].id == c.id) throw_data("category table: duplicate id ", c.id);
  }
  CategoryTable table;
  table.entries_ = std::move(entries);
  return table;
}

bool CategoryTable::contains(std::int32_t category_id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), category_id,
                             [](const Category& c, std::int32_t id) { return c.id < id; });
  return it != entries_.end() && it->id == category_id;
}

const Category& CategoryTable::at(std::int32_t category_id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), category_id,
                             [](const Category& c, std::int32_t id) { return c.id < id; });
  if (it == entries_.end() || it->id != category_id)
    throw_data("unknown category id ", category_id);
  return *it;
}

IdRaster::IdRaster(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) throw_data("raster dimensions must be >= 1, got ", height, "x", width);
  ids_.assign(static_cast<std::size_t>(height) * width, kVoidId);
}

IdRaster::IdRaster(int height, int width, std::vector<std::uint32_t> ids)
    : height_(height), width_(width), ids_(std::move(ids)) {
  if (height < 1 || width < 1) throw_data("raster dimensions must be >= 1, got ", height, "x", width);
  if (ids_.size() != static_cast<std::size_t>(height) * width)
    throw_data("raster id array length ", ids_.size(), " does not match ", height, "x", width);
}

ValidationResult validate_sequence(const std::vector<IdRaster>& frames,
                                   const std::map<std::uint32_t, std::int32_t>& segments,
                                   const CategoryTable& cats) {
  ValidationResult result;
  auto add = [&result](std::string code, std::string message, int frame = -1, int y = -1,
                       int x = -1) {
    result.violations.push_back({std::move(code), std::move(message), frame, y, x});
  };

  if (frames.empty()) {
    add("empty_video", "sequence has no frames");
    return result;
  }
  const int h = frames.front().height();
  const int w = frames.front().width();
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (frames[t].height() != h || frames[t].width() != w) {
      add("frame_dims", detail::concat("frame ", t, " is ", frames[t].height(), "x",
                                       frames[t].width(), ", expected ", h, "x", w),
          static_cast<int>(t));
    }
  }

  // First offending pixel per unmapped id, scanning frames in order. A run
  // cache keeps the common case (large constant regions) cheap.
  std::unordered_set<std::uint32_t> reported_unmapped;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const IdRaster& raster = frames[t];
    std::uint32_t prev = kVoidId;
    bool prev_ok = true;
    for (int y = 0; y < raster.height(); ++y) {
      for (int x = 0; x < raster.width(); ++x) {
        std::uint32_t id = raster.at(y, x);
        if (id == prev && prev_ok) continue;
        prev = id;
        prev_ok = id == kVoidId || segments.count(id) > 0;
        if (!prev_ok && reported_unmapped.insert(id).second) {
          add("unmapped_id",
              detail::concat("unmapped id ", id, " at frame ", t, " pixel (", y, ",", x, ")"),
              static_cast<int>(t), y, x);
        }
      }
    }
  }

  std::map<std::int32_t, std::vector<std::uint32_t>> stuff_ids;
  for (const auto& [id, category_id] : segments) {
    if (id == kVoidId) {
      add("void_segment", "segment map contains the reserved void id 0");
      continue;
    }
    if (!cats.contains(category_id)) {
      add("unknown_category",
          detail::concat("segment ", id, " maps to unknown category ", category_id));
      continue;
    }
    if (!cats.is_thing(category_id)) stuff_ids[category_id].push_back(id);
  }
  for (const auto& [category_id, ids] : stuff_ids) {
    if (ids.size() > 1) {
      add("duplicate_stuff_track",
          detail::concat("duplicate stuff track: category ", category_id, " has ", ids.size(),
                         " segment ids (stuff is a single track per video)"));
    }
  }
  return result;
}

namespace {

[[noreturn]] void throw_violations(const std::string& video_id, const ValidationResult& result) {
  std::string msg = detail::concat("sequence '", video_id, "' is invalid:");
  std::size_t shown = 0;
  for (const Violation& v : result.violations) {
    msg += detail::concat(" [", v.code, "] ", v.message, ";");
    if (++shown == 4 && result.violations.size() > 4) {
      msg += detail::concat(" (+", result.violations.size() - 4, " more)");
      break;
    }
  }
  throw_data(msg);
}

}  // namespace

VideoPanopticSequence VideoPanopticSequence::create(std::string video_id,
                                                    std::vector<IdRaster> frames,
                                                    std::map<std::uint32_t, std::int32_t> segments,
                                                    const CategoryTable& cats) {
  ValidationResult check = validate_sequence(frames, segments, cats);
  if (!check.ok()) throw_violations(video_id, check);
  VideoPanopticSequence seq;
  seq.video_id_ = std::move(video_id);
  seq.frames_ = std::move(frames);
  seq.segments_ = std::move(segments);
  return seq;
}

SemanticSequence SemanticSequence::create(std::string video_id, std::vector<IdRaster> frames,
                                          const CategoryTable& cats) {
  if (frames.empty()) throw_data("semantic sequence '", video_id, "' has no frames");
  const int h = frames.front().height();
  const int w = frames.front().width();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const IdRaster& raster = frames[t];
    if (raster.height() != h || raster.width() != w)
      throw_data("semantic sequence '", video_id, "': frame ", t, " dimensions differ");
    std::uint32_t prev = kVoidId;
    for (std::uint32_t id : raster.ids()) {
      if (id == prev) continue;
      prev = id;
      if (id != kVoidId && !cats.contains(static_cast<std::int32_t>(id)))
        throw_data("semantic sequence '", video_id, "': pixel value ", id,
                   " is not a known category");
    }
  }
  SemanticSequence seq;
  seq.video_id_ = std::move(video_id);
  seq.frames_ = std::move(frames);
  return seq;
}

InstanceSequence InstanceSequence::create(std::string video_id, std::vector<IdRaster> frames,
                                          std::map<std::uint32_t, std::int32_t> instances,
                                          const CategoryTable& cats) {
  if (frames.empty()) throw_data("instance sequence '", video_id, "' has no frames");
  const int h = frames.front().height();
  const int w = frames.front().width();
  for (const auto& [id, category_id] : instances) {
    if (id == kVoidId) throw_data("instance sequence '", video_id, "': id 0 is reserved for void");
    if (!cats.contains(category_id))
      throw_data("instance sequence '", video_id, "': unknown category ", category_id);
    if (!cats.is_thing(category_id))
      throw_data("instance sequence '", video_id, "': instance ", id, " maps to stuff category ",
                 category_id);
  }
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const IdRaster& raster = frames[t];
    if (raster.height() != h || raster.width() != w)
      throw_data("instance sequence '", video_id, "': frame ", t, " dimensions differ");
    std::uint32_t prev = kVoidId;
    for (std::uint32_t id : raster.ids()) {
      if (id == prev) continue;
      prev = id;
      if (id != kVoidId && instances.count(id) == 0)
        throw_data("instance sequence '", video_id, "': unmapped instance id ", id, " in frame ",
                   t);
    }
  }
  InstanceSequence seq;
  seq.video_id_ = std::move(video_id);
  seq.frames_ = std::move(frames);
  seq.instances_ = std::move(instances);
  return seq;
}

std::optional<double> VpqClassStats::quality() const {
  double denom = static_cast<double>(tp) + 0.5 * static_cast<double>(fp) +
                 0.5 * static_cast<double>(fn);
  if (denom <= 0.0) return std::nullopt;
  return iou_sum / denom;
}

}  // namespace vipseval
