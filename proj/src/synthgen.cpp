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

#include "vipseval/synthgen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "vipseval/error.hpp"

namespace vipseval {

namespace {

using nlohmann::json;

// Prediction-side pixels of dropped tracks: painted with a sentinel so
// later layers can still overwrite, flushed to void at the end.
constexpr std::uint32_t kHole = 0xFFFFFFFFu;

struct Rect {
  int y = 0, x = 0, h = 0, w = 0;
  bool empty() const { return h <= 0 || w <= 0; }
  Rect eroded(int radius) const { return {y + radius, x + radius, h - 2 * radius, w - 2 * radius}; }
};

void paint(IdRaster& raster, const Rect& rect, std::uint32_t id) {
  for (int yy = rect.y; yy < rect.y + rect.h; ++yy)
    for (int xx = rect.x; xx < rect.x + rect.w; ++xx) raster.set(yy, xx, id);
}

CategoryTable validate_spec(const ScenarioSpec& spec) {
  if (spec.height < 1 || spec.width < 1)
    throw_data("scenario '", spec.video_id, "': canvas must be at least 1x1");
  if (spec.frame_count < 1) throw_data("scenario '", spec.video_id, "': at least one frame");
  CategoryTable cats = CategoryTable::create(spec.categories);

  int used_rows = 0;
  for (const StuffBand& band : spec.bands) {
    if (band.rows < 1) throw_data("scenario '", spec.video_id, "': band with ", band.rows, " rows");
    if (band.category_id != 0 && cats.is_thing(band.category_id))
      throw_data("scenario '", spec.video_id, "': band category ", band.category_id,
                 " is a thing category");
    used_rows += band.rows;
  }
  if (used_rows > spec.height)
    throw_data("scenario '", spec.video_id, "': bands cover ", used_rows, " rows on a ",
               spec.height, "-row canvas");

  std::set<std::uint32_t> track_ids;
  for (const ThingTrack& track : spec.things) {
    if (track.track_id < 1 || track.track_id >= kStuffIdBase)
      throw_data("scenario '", spec.video_id, "': track id ", track.track_id, " outside [1, ",
                 kStuffIdBase, ")");
    if (!track_ids.insert(track.track_id).second)
      throw_data("scenario '", spec.video_id, "': duplicate track id ", track.track_id);
    if (!cats.is_thing(track.category_id))
      throw_data("scenario '", spec.video_id, "': track ", track.track_id,
                 " has stuff category ", track.category_id);
    if (track.rect_height < 1 || track.rect_width < 1)
      throw_data("scenario '", spec.video_id, "': track ", track.track_id, " rectangle is empty");
    if (static_cast<int>(track.positions.size()) != spec.frame_count)
      throw_data("scenario '", spec.video_id, "': track ", track.track_id, " has ",
                 track.positions.size(), " positions for ", spec.frame_count, " frames");
    for (const auto& [y, x] : track.positions) {
      if (y < 0 || x < 0 || y + track.rect_height > spec.height ||
          x + track.rect_width > spec.width)
        throw_data("scenario '", spec.video_id, "': track ", track.track_id,
                   " leaves the canvas at (", y, ",", x, ")");
    }
  }

  for (std::size_t i = 0; i < spec.perturbations.size(); ++i) {
    const Perturbation& p = spec.perturbations[i];
    auto require_track = [&](std::uint32_t id) {
      if (track_ids.count(id) == 0)
        throw_data("scenario '", spec.video_id, "': perturbation ", i, " targets unknown track ",
                   id);
    };
    switch (p.kind) {
      case Perturbation::Kind::kIdSwitch:
        require_track(p.track_id);
        if (p.at_frame < 1 || p.at_frame >= spec.frame_count)
          throw_data("scenario '", spec.video_id, "': id_switch at frame ", p.at_frame,
                     " outside [1, ", spec.frame_count - 1, "]");
        break;
      case Perturbation::Kind::kErode:
        if (p.track_id != 0) require_track(p.track_id);
        if (p.radius < 1)
          throw_data("scenario '", spec.video_id, "': erode radius must be >= 1");
        break;
      case Perturbation::Kind::kClassFlip:
        require_track(p.track_id);
        if (!cats.contains(p.new_category_id) || !cats.is_thing(p.new_category_id))
          throw_data("scenario '", spec.video_id, "': class_flip to non-thing category ",
                     p.new_category_id);
        break;
      case Perturbation::Kind::kDrop:
        require_track(p.track_id);
        break;
      case Perturbation::Kind::kSpurious:
        if (!cats.contains(p.new_category_id) || !cats.is_thing(p.new_category_id))
          throw_data("scenario '", spec.video_id, "': spurious segment with non-thing category ",
                     p.new_category_id);
        if (p.rect_height < 1 || p.rect_width < 1 || p.rect_y < 0 || p.rect_x < 0 ||
            p.rect_y + p.rect_height > spec.height || p.rect_x + p.rect_width > spec.width)
          throw_data("scenario '", spec.video_id, "': spurious rectangle leaves the canvas");
        if (p.frame_begin < 0 || p.frame_end > spec.frame_count || p.frame_begin >= p.frame_end)
          throw_data("scenario '", spec.video_id, "': spurious frame range [", p.frame_begin,
                     ", ", p.frame_end, ") is invalid");
        break;
    }
  }
  return cats;
}

void paint_bands(IdRaster& raster, const ScenarioSpec& spec) {
  int row = 0;
  for (const StuffBand& band : spec.bands) {
    if (band.category_id != 0)
      paint(raster, Rect{row, 0, band.rows, spec.width},
            kStuffIdBase + static_cast<std::uint32_t>(band.category_id));
    row += band.rows;
  }
}

}  // namespace

GeneratedScene generate(const ScenarioSpec& spec) {
  CategoryTable cats = validate_spec(spec);
  const int frame_count = spec.frame_count;

  // Prediction-side state derived from the ordered perturbation list.
  struct TrackState {
    bool dropped = false;
    int erode_radius = 0;
    std::int32_t category_id = 0;
    std::vector<std::uint32_t> frame_ids;
  };
  std::map<std::uint32_t, TrackState> states;
  for (const ThingTrack& track : spec.things) {
    TrackState state;
    state.category_id = track.category_id;
    state.frame_ids.assign(static_cast<std::size_t>(frame_count), track.track_id);
    states.emplace(track.track_id, std::move(state));
  }
  struct SpuriousSegment {
    std::uint32_t id;
    const Perturbation* p;
  };
  std::vector<SpuriousSegment> spurious;
  int global_erode = 0;
  for (std::size_t i = 0; i < spec.perturbations.size(); ++i) {
    const Perturbation& p = spec.perturbations[i];
    switch (p.kind) {
      case Perturbation::Kind::kIdSwitch: {
        const std::uint32_t fresh = kSwitchIdBase + static_cast<std::uint32_t>(i);
        auto& ids = states.at(p.track_id).frame_ids;
        for (int t = p.at_frame; t < frame_count; ++t) ids[t] = fresh;
        break;
      }
      case Perturbation::Kind::kErode:
        if (p.track_id == 0) {
          global_erode += p.radius;
        } else {
          states.at(p.track_id).erode_radius += p.radius;
        }
        break;
      case Perturbation::Kind::kClassFlip:
        states.at(p.track_id).category_id = p.new_category_id;
        break;
      case Perturbation::Kind::kDrop:
        states.at(p.track_id).dropped = true;
        break;
      case Perturbation::Kind::kSpurious:
        spurious.push_back({kSpuriousIdBase + static_cast<std::uint32_t>(i), &p});
        break;
    }
  }

  std::map<std::uint32_t, std::int32_t> gt_segments;
  std::map<std::uint32_t, std::int32_t> pred_segments;
  for (const StuffBand& band : spec.bands) {
    if (band.category_id == 0) continue;
    const std::uint32_t id = kStuffIdBase + static_cast<std::uint32_t>(band.category_id);
    gt_segments[id] = band.category_id;
    pred_segments[id] = band.category_id;
  }
  for (const ThingTrack& track : spec.things) {
    gt_segments[track.track_id] = track.category_id;
    const TrackState& state = states.at(track.track_id);
    if (state.dropped) continue;
    for (std::uint32_t id : state.frame_ids) pred_segments[id] = state.category_id;
  }
  for (const SpuriousSegment& s : spurious) pred_segments[s.id] = s.p->new_category_id;

  std::vector<IdRaster> gt_frames, pred_frames;
  gt_frames.reserve(frame_count);
  pred_frames.reserve(frame_count);
  for (int t = 0; t < frame_count; ++t) {
    IdRaster gt_raster(spec.height, spec.width);
    IdRaster pred_raster(spec.height, spec.width);
    paint_bands(gt_raster, spec);
    paint_bands(pred_raster, spec);

    for (const ThingTrack& track : spec.things) {
      const auto& [y, x] = track.positions[t];
      const Rect rect{y, x, track.rect_height, track.rect_width};
      paint(gt_raster, rect, track.track_id);

      const TrackState& state = states.at(track.track_id);
      if (state.dropped) {
        paint(pred_raster, rect, kHole);
        continue;
      }
      const Rect eroded = rect.eroded(state.erode_radius + global_erode);
      if (!eroded.empty()) paint(pred_raster, eroded, state.frame_ids[t]);
    }
    for (const SpuriousSegment& s : spurious) {
      if (t < s.p->frame_begin || t >= s.p->frame_end) continue;
      paint(pred_raster, Rect{s.p->rect_y, s.p->rect_x, s.p->rect_height, s.p->rect_width}, s.id);
    }
    for (std::uint32_t& id : pred_raster.ids())
      if (id == kHole) id = kVoidId;

    gt_frames.push_back(std::move(gt_raster));
    pred_frames.push_back(std::move(pred_raster));
  }

  VideoPanopticSequence gt = VideoPanopticSequence::create(spec.video_id, std::move(gt_frames),
                                                           std::move(gt_segments), cats);
  VideoPanopticSequence pred = VideoPanopticSequence::create(
      spec.video_id, std::move(pred_frames), std::move(pred_segments), cats);
  return GeneratedScene{std::move(cats), std::move(gt), std::move(pred)};
}

namespace {

const char* kind_name(Perturbation::Kind kind) {
  switch (kind) {
    case Perturbation::Kind::kIdSwitch: return "id_switch";
    case Perturbation::Kind::kErode: return "erode";
    case Perturbation::Kind::kClassFlip: return "class_flip";
    case Perturbation::Kind::kDrop: return "drop";
    case Perturbation::Kind::kSpurious: return "spurious";
  }
  throw_internal("unknown perturbation kind");
}

Perturbation::Kind kind_from_name(const std::string& name) {
  if (name == "id_switch") return Perturbation::Kind::kIdSwitch;
  if (name == "erode") return Perturbation::Kind::kErode;
  if (name == "class_flip") return Perturbation::Kind::kClassFlip;
  if (name == "drop") return Perturbation::Kind::kDrop;
  if (name == "spurious") return Perturbation::Kind::kSpurious;
  throw_data("unknown perturbation kind '", name, "'");
}

}  // namespace

ScenarioSpec parse_scenario_json(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw_data("malformed scenario JSON");
  ScenarioSpec spec;
  spec.video_id = j.value("video_id", std::string("scene"));
  spec.height = j.at("height").get<int>();
  spec.width = j.at("width").get<int>();
  spec.frame_count = j.at("frames").get<int>();
  spec.seed = j.value("seed", 0ull);
  for (const json& c : j.at("categories")) {
    spec.categories.push_back(Category{c.at("id").get<std::int32_t>(),
                                       c.at("name").get<std::string>(),
                                       c.at("is_thing").get<bool>()});
  }
  for (const json& b : j.value("stuff_bands", json::array())) {
    spec.bands.push_back(
        StuffBand{b.at("category_id").get<std::int32_t>(), b.at("rows").get<int>()});
  }
  for (const json& t : j.value("things", json::array())) {
    ThingTrack track;
    track.track_id = t.at("track_id").get<std::uint32_t>();
    track.category_id = t.at("category_id").get<std::int32_t>();
    track.rect_height = t.at("rect_height").get<int>();
    track.rect_width = t.at("rect_width").get<int>();
    for (const json& pos : t.at("positions"))
      track.positions.emplace_back(pos.at(0).get<int>(), pos.at(1).get<int>());
    spec.things.push_back(std::move(track));
  }
  for (const json& p : j.value("perturbations", json::array())) {
    Perturbation pert;
    pert.kind = kind_from_name(p.at("kind").get<std::string>());
    pert.track_id = p.value("track_id", 0u);
    pert.at_frame = p.value("at_frame", 0);
    pert.radius = p.value("radius", 0);
    pert.new_category_id = p.value("new_category_id", 0);
    if (auto it = p.find("rect"); it != p.end()) {
      pert.rect_y = it->at(0).get<int>();
      pert.rect_x = it->at(1).get<int>();
      pert.rect_height = it->at(2).get<int>();
      pert.rect_width = it->at(3).get<int>();
    }
    if (auto it = p.find("frames"); it != p.end()) {
      pert.frame_begin = it->at(0).get<int>();
      pert.frame_end = it->at(1).get<int>();
    }
    spec.perturbations.push_back(pert);
  }
  return spec;
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  json categories = json::array();
  for (const Category& c : spec.categories)
    categories.push_back({{"id", c.id}, {"name", c.name}, {"is_thing", c.is_thing}});
  json bands = json::array();
  for (const StuffBand& b : spec.bands)
    bands.push_back({{"category_id", b.category_id}, {"rows", b.rows}});
  json things = json::array();
  for (const ThingTrack& t : spec.things) {
    json positions = json::array();
    for (const auto& [y, x] : t.positions) positions.push_back({y, x});
    things.push_back({{"track_id", t.track_id},
                      {"category_id", t.category_id},
                      {"rect_height", t.rect_height},
                      {"rect_width", t.rect_width},
                      {"positions", positions}});
  }
  json perturbations = json::array();
  for (const Perturbation& p : spec.perturbations) {
    json entry = {{"kind", kind_name(p.kind)}};
    switch (p.kind) {
      case Perturbation::Kind::kIdSwitch:
        entry["track_id"] = p.track_id;
        entry["at_frame"] = p.at_frame;
        break;
      case Perturbation::Kind::kErode:
        entry["track_id"] = p.track_id;
        entry["radius"] = p.radius;
        break;
      case Perturbation::Kind::kClassFlip:
        entry["track_id"] = p.track_id;
        entry["new_category_id"] = p.new_category_id;
        break;
      case Perturbation::Kind::kDrop:
        entry["track_id"] = p.track_id;
        break;
      case Perturbation::Kind::kSpurious:
        entry["new_category_id"] = p.new_category_id;
        entry["rect"] = {p.rect_y, p.rect_x, p.rect_height, p.rect_width};
        entry["frames"] = {p.frame_begin, p.frame_end};
        break;
    }
    perturbations.push_back(std::move(entry));
  }
  json j = {{"video_id", spec.video_id}, {"height", spec.height},       {"width", spec.width},
            {"frames", spec.frame_count}, {"seed", spec.seed},          {"categories", categories},
            {"stuff_bands", bands},       {"things", things},           {"perturbations", perturbations}};
  return j.dump(2) + "\n";
}

ScenarioSpec random_scenario(std::uint64_t seed, const ScenarioLimits& limits) {
  std::uint64_t state = seed;
  auto next = [&state] { return splitmix64_next(state); };
  auto uniform = [&next](int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto chance = [&next](int percent) { return static_cast<int>(next() % 100) < percent; };

  ScenarioSpec spec;
  spec.seed = seed;
  spec.video_id = "scene_" + std::to_string(seed);
  spec.height = uniform(std::max(2, limits.min_height),
                        std::max(std::max(2, limits.min_height), limits.max_height));
  spec.width = uniform(std::max(2, limits.min_width),
                       std::max(std::max(2, limits.min_width), limits.max_width));
  spec.frame_count = uniform(std::max(1, limits.min_frames), std::max(1, limits.max_frames));

  // Categories: a random thing/stuff mix satisfying the structural needs.
  int category_count = uniform(1, std::max(1, limits.max_categories));
  if (limits.require_thing_track && limits.full_stuff_coverage)
    category_count = std::max(category_count, 2);
  std::vector<bool> thing_flags(category_count);
  for (int i = 0; i < category_count; ++i) thing_flags[i] = chance(50);
  if (limits.require_thing_track &&
      std::none_of(thing_flags.begin(), thing_flags.end(), [](bool b) { return b; }))
    thing_flags[uniform(0, category_count - 1)] = true;
  if (limits.full_stuff_coverage &&
      std::all_of(thing_flags.begin(), thing_flags.end(), [](bool b) { return b; }))
    thing_flags[uniform(0, category_count - 1)] = false;
  std::vector<std::int32_t> thing_cats, stuff_cats;
  for (int i = 0; i < category_count; ++i) {
    const std::int32_t id = i + 1;
    spec.categories.push_back(
        Category{id, (thing_flags[i] ? "thing_" : "stuff_") + std::to_string(id), thing_flags[i]});
    (thing_flags[i] ? thing_cats : stuff_cats).push_back(id);
  }

  if (!stuff_cats.empty()) {
    int rows_left = spec.height;
    const int band_count = limits.full_stuff_coverage ? uniform(1, 3) : uniform(0, 3);
    for (int b = 0; b < band_count && rows_left > 0; ++b) {
      int rows = (limits.full_stuff_coverage && b == band_count - 1)
                     ? rows_left
                     : uniform(1, rows_left);
      std::int32_t category = stuff_cats[uniform(0, static_cast<int>(stuff_cats.size()) - 1)];
      if (!limits.full_stuff_coverage && limits.allow_void_gap && chance(20)) category = 0;
      if (category == 0) {
        spec.bands.push_back(StuffBand{0, rows});
      } else {
        spec.bands.push_back(StuffBand{category, rows});
      }
      rows_left -= rows;
    }
    if (limits.full_stuff_coverage && rows_left > 0)
      spec.bands.push_back(StuffBand{stuff_cats[0], rows_left});
  }

  if (!thing_cats.empty()) {
    const int lo = limits.require_thing_track ? 1 : 0;
    const int track_count = uniform(lo, std::max(lo, limits.max_things));
    for (int i = 0; i < track_count; ++i) {
      ThingTrack track;
      track.track_id = static_cast<std::uint32_t>(i + 1);
      track.category_id = thing_cats[uniform(0, static_cast<int>(thing_cats.size()) - 1)];
      const int max_h = std::max(limits.min_thing_extent, spec.height - 1);
      const int max_w = std::max(limits.min_thing_extent, spec.width - 1);
      track.rect_height = uniform(std::min(limits.min_thing_extent, spec.height),
                                  std::min(max_h, spec.height));
      track.rect_width = uniform(std::min(limits.min_thing_extent, spec.width),
                                 std::min(max_w, spec.width));
      int y = uniform(0, spec.height - track.rect_height);
      int x = uniform(0, spec.width - track.rect_width);
      for (int t = 0; t < spec.frame_count; ++t) {
        track.positions.emplace_back(y, x);
        y = std::clamp(y + uniform(-1, 1), 0, spec.height - track.rect_height);
        x = std::clamp(x + uniform(-1, 1), 0, spec.width - track.rect_width);
      }
      spec.things.push_back(std::move(track));
    }
  }

  std::vector<Perturbation::Kind> feasible;
  if (limits.allow_id_switch && !spec.things.empty() && spec.frame_count >= 2)
    feasible.push_back(Perturbation::Kind::kIdSwitch);
  if (limits.allow_erode && !spec.things.empty()) feasible.push_back(Perturbation::Kind::kErode);
  if (limits.allow_class_flip && !spec.things.empty() && !thing_cats.empty())
    feasible.push_back(Perturbation::Kind::kClassFlip);
  if (limits.allow_drop && !spec.things.empty()) feasible.push_back(Perturbation::Kind::kDrop);
  if (limits.allow_spurious && !thing_cats.empty())
    feasible.push_back(Perturbation::Kind::kSpurious);

  if (!feasible.empty()) {
    const int count = uniform(0, std::max(0, limits.max_perturbations));
    for (int i = 0; i < count; ++i) {
      Perturbation p;
      p.kind = feasible[uniform(0, static_cast<int>(feasible.size()) - 1)];
      auto random_track = [&] {
        return spec.things[uniform(0, static_cast<int>(spec.things.size()) - 1)].track_id;
      };
      switch (p.kind) {
        case Perturbation::Kind::kIdSwitch:
          p.track_id = random_track();
          p.at_frame = uniform(1, spec.frame_count - 1);
          break;
        case Perturbation::Kind::kErode:
          p.track_id = chance(30) ? 0 : random_track();
          p.radius = uniform(1, 2);
          break;
        case Perturbation::Kind::kClassFlip:
          p.track_id = random_track();
          p.new_category_id = thing_cats[uniform(0, static_cast<int>(thing_cats.size()) - 1)];
          break;
        case Perturbation::Kind::kDrop:
          p.track_id = random_track();
          break;
        case Perturbation::Kind::kSpurious:
          p.new_category_id = thing_cats[uniform(0, static_cast<int>(thing_cats.size()) - 1)];
          p.rect_height = uniform(1, std::min(3, spec.height));
          p.rect_width = uniform(1, std::min(3, spec.width));
          p.rect_y = uniform(0, spec.height - p.rect_height);
          p.rect_x = uniform(0, spec.width - p.rect_width);
          p.frame_begin = uniform(0, spec.frame_count - 1);
          p.frame_end = uniform(p.frame_begin + 1, spec.frame_count);
          break;
      }
      spec.perturbations.push_back(p);
    }
  }
  return spec;
}

}  // namespace vipseval
