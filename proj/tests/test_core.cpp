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

#include <doctest.h>

#include <cstdlib>

#include "test_util.hpp"
#include "vipseval/core.hpp"
#include "vipseval/error.hpp"
#include "vipseval/synthgen.hpp"
#include "vipseval/threading.hpp"

using namespace vipseval;
using namespace vipseval::testing;

TEST_CASE("category table rejects bad entries") {
  CHECK_THROWS_AS(CategoryTable::create({}), Error);
  CHECK_THROWS_AS(CategoryTable::create({{0, "zero", false}}), Error);
  CHECK_THROWS_AS(CategoryTable::create({{1, "", false}}), Error);
  CHECK_THROWS_AS(CategoryTable::create({{1, "a", false}, {1, "b", true}}), Error);

  CategoryTable cats = make_cats({{2, true}, {1, false}});
  CHECK(cats.size() == 2);
  CHECK(cats.contains(1));
  CHECK(cats.is_thing(2));
  CHECK_FALSE(cats.is_thing(1));
  CHECK_THROWS_AS(cats.at(3), Error);
}

TEST_CASE("raster shape checks") {
  CHECK_THROWS_AS(IdRaster(0, 4), Error);
  CHECK_THROWS_AS(IdRaster(2, 2, {1, 2, 3}), Error);
  IdRaster raster = make_raster(2, 2, {0, 1, 1, 0});
  CHECK(raster.at(0, 1) == 1);
  CHECK(raster.pixel_count() == 4);
}

TEST_CASE("well-formed two-frame scene validates") {
  CategoryTable cats = make_cats({{1, false}, {2, true}});
  std::vector<IdRaster> frames{make_raster(2, 2, {9, 9, 7, 7}),
                               make_raster(2, 2, {9, 7, 7, 7})};
  std::map<std::uint32_t, std::int32_t> segments{{9, 1}, {7, 2}};
  ValidationResult result = validate_sequence(frames, segments, cats);
  CHECK(result.ok());
  CHECK_NOTHROW(make_seq("v", frames, segments, cats));
}

TEST_CASE("unmapped id is reported with frame and pixel") {
  CategoryTable cats = make_cats({{1, false}});
  std::vector<IdRaster> frames{make_raster(2, 2, {0, 0, 0, 0}),
                               make_raster(2, 2, {0, 0, 9, 0})};
  std::map<std::uint32_t, std::int32_t> segments;
  ValidationResult result = validate_sequence(frames, segments, cats);
  REQUIRE(result.violations.size() == 1);
  const Violation& v = result.violations.front();
  CHECK(v.code == "unmapped_id");
  CHECK(v.frame == 1);
  CHECK(v.y == 1);
  CHECK(v.x == 0);
  CHECK(v.message == "unmapped id 9 at frame 1 pixel (1,0)");
  CHECK_THROWS_AS(make_seq("v", frames, segments, cats), Error);
}

TEST_CASE("two ids on one stuff category is a duplicate stuff track") {
  CategoryTable cats = make_cats({{1, false}});
  std::vector<IdRaster> frames{make_raster(1, 2, {3, 4})};
  std::map<std::uint32_t, std::int32_t> segments{{3, 1}, {4, 1}};
  ValidationResult result = validate_sequence(frames, segments, cats);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations.front().code == "duplicate_stuff_track");
}

TEST_CASE("further sequence violations") {
  CategoryTable cats = make_cats({{1, false}, {2, true}});

  SUBCASE("no frames") {
    ValidationResult result = validate_sequence({}, {}, cats);
    REQUIRE_FALSE(result.ok());
    CHECK(result.violations.front().code == "empty_video");
  }
  SUBCASE("frame dimension mismatch") {
    std::vector<IdRaster> frames;
    frames.push_back(make_raster(1, 2, {0, 0}));
    frames.push_back(make_raster(2, 1, {0, 0}));
    ValidationResult result = validate_sequence(frames, {}, cats);
    REQUIRE_FALSE(result.ok());
    CHECK(result.violations.front().code == "frame_dims");
  }
  SUBCASE("unknown category in the segment map") {
    std::vector<IdRaster> frames;
    frames.push_back(make_raster(1, 1, {5}));
    ValidationResult result = validate_sequence(frames, {{5, 99}}, cats);
    REQUIRE_FALSE(result.ok());
    CHECK(result.violations.front().code == "unknown_category");
  }
  SUBCASE("void id in the segment map") {
    std::vector<IdRaster> frames;
    frames.push_back(make_raster(1, 1, {0}));
    ValidationResult result = validate_sequence(frames, {{0, 1}}, cats);
    REQUIRE_FALSE(result.ok());
    CHECK(result.violations.front().code == "void_segment");
  }
  SUBCASE("two thing tracks of one category are fine") {
    std::vector<IdRaster> frames;
    frames.push_back(make_raster(1, 2, {5, 6}));
    CHECK(validate_sequence(frames, {{5, 2}, {6, 2}}, cats).ok());
  }
}

// validate_sequence(s, c) says ok exactly when construction succeeds: fuzz
// over random generated scenes plus mutations.
TEST_CASE("validation agrees with construction") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratedScene scene = generate(random_scenario(seed));

    std::vector<IdRaster> frames = scene.pred.frames();
    std::map<std::uint32_t, std::int32_t> segments = scene.pred.segments();
    std::uint64_t state = seed * 77 + 1;
    switch (splitmix64_next(state) % 3) {
      case 0:  // poke an unmapped id somewhere
        frames.front().set(0, 0, 123456);
        break;
      case 1:  // corrupt a mapped category
        if (!segments.empty()) segments.begin()->second = 9999;
        break;
      default:  // leave valid
        break;
    }
    const bool ok = validate_sequence(frames, segments, scene.cats).ok();
    bool constructed = true;
    try {
      VideoPanopticSequence::create("fuzz", frames, segments, scene.cats);
    } catch (const Error&) {
      constructed = false;
    }
    CHECK(ok == constructed);
  }
}

TEST_CASE("thread resolution honors the environment override") {
  CHECK(resolve_threads(5) == 5);
  setenv("VIPSEVAL_THREADS", "3", 1);
  CHECK(resolve_threads(0) == 3);
  CHECK(resolve_threads(7) == 7);  // explicit request wins
  unsetenv("VIPSEVAL_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("parallel_for fills every slot and propagates the first failure") {
  std::vector<int> slots(100, 0);
  parallel_for(slots.size(), 4, [&](std::size_t i) { slots[i] = static_cast<int>(i) + 1; });
  for (std::size_t i = 0; i < slots.size(); ++i) CHECK(slots[i] == static_cast<int>(i) + 1);

  CHECK_THROWS_WITH_AS(
      parallel_for(8, 3,
                   [](std::size_t i) {
                     if (i % 2 == 1) throw_data("task ", i, " failed");
                   }),
      doctest::Contains("task 1"), Error);
}

TEST_CASE("vpq class stats quality formula") {
  VpqClassStats stats{0.6, 1, 0, 0};
  REQUIRE(stats.quality().has_value());
  CHECK(*stats.quality() == doctest::Approx(0.6));
  VpqClassStats fn_only{0.0, 0, 0, 2};
  CHECK(*fn_only.quality() == doctest::Approx(0.0));
  VpqClassStats empty{0.0, 0, 0, 0};
  CHECK_FALSE(empty.quality().has_value());
}
