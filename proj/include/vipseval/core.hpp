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

#ifndef VIPSEVAL_CORE_HPP
#define VIPSEVAL_CORE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vipseval {

// Segment id 0 and category id 0 are the reserved void sentinel everywhere:
// a pixel carrying 0 has no label and is excluded from ground-truth-side
// metric denominators.
inline constexpr std::uint32_t kVoidId = 0;

struct Category {
  std::int32_t id = 0;
  std::string name;
  bool is_thing = false;
};

// Immutable category inventory. Ids are unique and >= 1; lookups by id are
// O(log n).
class CategoryTable {
 public:
  // Validates and sorts the entries by id. Throws Error(kData) on duplicate
  // or non-positive ids, empty names, or an empty table.
  static CategoryTable create(std::vector<Category> entries);

  const std::vector<Category>& entries() const { return entries_; }
  bool contains(std::int32_t category_id) const;
  const Category& at(std::int32_t category_id) const;
  bool is_thing(std::int32_t category_id) const { return at(category_id).is_thing; }
  std::size_t size() const { return entries_.size(); }

 private:
  CategoryTable() = default;
  std::vector<Category> entries_;  // sorted by id
};

// Row-major raster of 32-bit segment (or category) ids, 0 = void.
class IdRaster {
 public:
  IdRaster(int height, int width);  // zero-filled
  IdRaster(int height, int width, std::vector<std::uint32_t> ids);

  int height() const { return height_; }
  int width() const { return width_; }
  std::uint32_t at(int y, int x) const { return ids_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int y, int x, std::uint32_t id) { ids_[static_cast<std::size_t>(y) * width_ + x] = id; }
  const std::vector<std::uint32_t>& ids() const { return ids_; }
  std::vector<std::uint32_t>& ids() { return ids_; }
  std::size_t pixel_count() const { return ids_.size(); }

  bool operator==(const IdRaster& other) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint32_t> ids_;
};

// One invariant violation found in a candidate sequence. `frame`, `y`, `x`
// point at the first offending pixel when the violation is pixel-addressed;
// they are -1 for map-level violations.
struct Violation {
  std::string code;
  std::string message;
  int frame = -1;
  int y = -1;
  int x = -1;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks full video-panoptic invariants for candidate data: non-empty frame
// list, uniform dimensions, every nonzero pixel id mapped, every mapped
// category known, and at most one segment id per stuff category. Violations
// are data, not failures; this never throws on bad content.
ValidationResult validate_sequence(const std::vector<IdRaster>& frames,
                                   const std::map<std::uint32_t, std::int32_t>& segments,
                                   const CategoryTable& cats);

// Per-frame segment-id rasters plus the segment -> category map. Thing
// segment ids are track ids (the same id across frames is the same
// instance); each stuff category owns at most one segment id per video.
// Values are validated on construction and immutable afterwards.
class VideoPanopticSequence {
 public:
  // Throws Error(kData) carrying the first violations when the candidate
  // fails validate_sequence.
  static VideoPanopticSequence create(std::string video_id, std::vector<IdRaster> frames,
                                      std::map<std::uint32_t, std::int32_t> segments,
                                      const CategoryTable& cats);

  const std::string& video_id() const { return video_id_; }
  const std::vector<IdRaster>& frames() const { return frames_; }
  const std::map<std::uint32_t, std::int32_t>& segments() const { return segments_; }
  int height() const { return frames_.front().height(); }
  int width() const { return frames_.front().width(); }
  int frame_count() const { return static_cast<int>(frames_.size()); }

 private:
  VideoPanopticSequence() = default;
  std::string video_id_;
  std::vector<IdRaster> frames_;
  std::map<std::uint32_t, std::int32_t> segments_;
};

// Frames of category ids (0 = void).
class SemanticSequence {
 public:
  static SemanticSequence create(std::string video_id, std::vector<IdRaster> frames,
                                 const CategoryTable& cats);

  const std::string& video_id() const { return video_id_; }
  const std::vector<IdRaster>& frames() const { return frames_; }

 private:
  SemanticSequence() = default;
  std::string video_id_;
  std::vector<IdRaster> frames_;
};

// Frames of instance track ids (0 = void) plus id -> thing category.
class InstanceSequence {
 public:
  static InstanceSequence create(std::string video_id, std::vector<IdRaster> frames,
                                 std::map<std::uint32_t, std::int32_t> instances,
                                 const CategoryTable& cats);

  const std::string& video_id() const { return video_id_; }
  const std::vector<IdRaster>& frames() const { return frames_; }
  const std::map<std::uint32_t, std::int32_t>& instances() const { return instances_; }

 private:
  InstanceSequence() = default;
  std::string video_id_;
  std::vector<IdRaster> frames_;
  std::map<std::uint32_t, std::int32_t> instances_;
};

struct VpqClassStats {
  double iou_sum = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  // iou_sum / (tp + fp/2 + fn/2); nullopt when the denominator is zero.
  std::optional<double> quality() const;
};

struct VpqWindowResult {
  int window = 0;
  // Keyed by category id; only categories with tp + fp + fn > 0 enter the
  // window mean.
  std::map<std::int32_t, VpqClassStats> per_class;
  double vpq = 0.0;
  std::int64_t classes_evaluated = 0;
};

struct VpqReport {
  std::vector<VpqWindowResult> windows;  // ordered as requested
  double overall_vpq = 0.0;              // arithmetic mean of the window scores
};

struct ClassIou {
  std::int32_t category_id = 0;
  double iou = 0.0;
};

struct TrackAq {
  std::string video_id;
  std::uint32_t track_id = 0;
  double aq = 0.0;
};

struct StqReport {
  // aq and stq are empty when the ground truth contains no thing track at
  // all; aggregating such a report is an error for the caller.
  std::optional<double> aq;
  double sq = 0.0;
  std::optional<double> stq;
  std::vector<ClassIou> per_class_iou;  // classes present in gt or pred
  std::vector<TrackAq> per_track_aq;    // sorted by (video_id, track_id)
};

}  // namespace vipseval

#endif  // VIPSEVAL_CORE_HPP
