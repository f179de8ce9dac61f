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
// Deterministic synthetic video panoptic scenes with controllable
// degradations. Ground truth renders the scenario as written: horizontal
// stuff bands at the bottom layer, thing rectangles painted over them in
// list order. The prediction renders the same scenario after applying the
// perturbation list in order. Everything is integer arithmetic, so outputs
// are byte-identical across runs and platforms.
//
// Segment id layout: stuff bands use kStuffIdBase + category_id; ids
// introduced by id_switch start at kSwitchIdBase, spurious segments at
// kSpuriousIdBase, each advancing by the perturbation's position in the
// list. Track ids declared in the scenario must stay below kStuffIdBase.

#ifndef VIPSEVAL_SYNTHGEN_HPP
#define VIPSEVAL_SYNTHGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vipseval/core.hpp"

namespace vipseval {

inline constexpr std::uint32_t kStuffIdBase = 1'000'000;
inline constexpr std::uint32_t kSwitchIdBase = 2'000'000;
inline constexpr std::uint32_t kSpuriousIdBase = 3'000'000;

// SplitMix64: the fixed 64-bit generator behind every randomized scenario,
// chosen so reimplementations can reproduce streams bit-exactly.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct StuffBand {
  std::int32_t category_id = 0;  // 0 = unlabeled gap
  int rows = 0;
};

struct ThingTrack {
  std::uint32_t track_id = 0;
  std::int32_t category_id = 0;
  int rect_height = 0;
  int rect_width = 0;
  std::vector<std::pair<int, int>> positions;  // per-frame top-left (y, x)
};

struct Perturbation {
  enum class Kind { kIdSwitch, kErode, kClassFlip, kDrop, kSpurious };
  Kind kind = Kind::kIdSwitch;
  std::uint32_t track_id = 0;  // erode: 0 = all tracks
  int at_frame = 0;            // id_switch: frames >= at_frame carry the new id
  int radius = 0;              // erode
  std::int32_t new_category_id = 0;  // class_flip / spurious
  int rect_y = 0, rect_x = 0, rect_height = 0, rect_width = 0;  // spurious
  int frame_begin = 0, frame_end = 0;                           // spurious, [begin, end)
};

struct ScenarioSpec {
  std::string video_id = "scene";
  int height = 0;
  int width = 0;
  int frame_count = 0;
  std::uint64_t seed = 0;  // provenance tag; rendering itself is seed-free
  std::vector<Category> categories;
  std::vector<StuffBand> bands;  // top-down, rows must not exceed height
  std::vector<ThingTrack> things;
  std::vector<Perturbation> perturbations;
};

struct GeneratedScene {
  CategoryTable cats;
  VideoPanopticSequence gt;
  VideoPanopticSequence pred;
};

// Validates the scenario and renders both sequences. Dropped tracks leave
// unlabeled holes in the prediction (they do not expose the layers below),
// so a drop touches no other segment's pixels.
GeneratedScene generate(const ScenarioSpec& spec);

// JSON round trip for the scenario schema used by the CLI.
ScenarioSpec parse_scenario_json(const std::string& json_text);
std::string scenario_to_json(const ScenarioSpec& spec);

// Knobs for randomized scenarios; defaults give the widest mix the stated
// bounds allow (void gaps, overlaps, every perturbation kind).
struct ScenarioLimits {
  int min_height = 2;
  int max_height = 8;
  int min_width = 2;
  int max_width = 8;
  int min_frames = 1;
  int max_frames = 6;
  int max_categories = 3;
  int max_things = 4;
  int max_perturbations = 3;
  bool allow_void_gap = true;
  bool allow_spurious = true;
  bool allow_erode = true;
  bool allow_id_switch = true;
  bool allow_class_flip = true;
  bool allow_drop = true;
  bool require_thing_track = false;  // force >= 1 thing track
  bool full_stuff_coverage = false;  // bands cover the whole canvas
  int min_thing_extent = 1;          // minimum rectangle side
};

// Derives a scenario from the seed via SplitMix64. Identical (seed, limits)
// always produce the identical scenario.
ScenarioSpec random_scenario(std::uint64_t seed, const ScenarioLimits& limits = {});

}  // namespace vipseval

#endif  // VIPSEVAL_SYNTHGEN_HPP
