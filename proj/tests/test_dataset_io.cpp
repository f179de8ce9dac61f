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

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "test_util.hpp"
#include "vipseval/dataset_io.hpp"
#include "vipseval/error.hpp"
#include "vipseval/synthgen.hpp"

using namespace vipseval;
using namespace vipseval::testing;

namespace {

std::vector<float> random_floats(std::uint64_t seed, std::size_t count) {
  std::vector<float> values(count);
  std::uint64_t state = seed;
  for (float& v : values) {
    // Map to roughly [-8, 8) with plenty of mantissa variety.
    v = static_cast<float>(static_cast<double>(splitmix64_next(state)) /
                               static_cast<double>(1ull << 60) -
                           8.0);
  }
  return values;
}

}  // namespace

TEST_CASE("pixel id encoding follows R + 256 G + 65536 B") {
  // Round-trip through actual PNG files pins the byte order.
  TempDir dir("png_ids");
  CategoryTable cats = make_cats({{1, false}, {2, false}});
  std::vector<IdRaster> frames;
  frames.push_back(make_raster(1, 3, {5, 256, 0}));
  VideoPanopticSequence seq = make_seq("ids", std::move(frames), {{5, 1}, {256, 2}}, cats);

  ManifestVideo entry = save_sequence(seq, dir.path());
  VideoPanopticSequence loaded = load_sequence(entry, cats, dir.path());
  CHECK(loaded.frames()[0].at(0, 0) == 5);    // RGB (5, 0, 0)
  CHECK(loaded.frames()[0].at(0, 1) == 256);  // RGB (0, 1, 0)
  CHECK(loaded.frames()[0].at(0, 2) == 0);    // black = void, needs no sidecar entry
}

TEST_CASE("sequence round trip is bit exact on random scenes") {
  for (std::uint64_t seed = 10; seed < 18; ++seed) {
    TempDir dir("seq_rt");
    GeneratedScene scene = generate(random_scenario(seed));
    ManifestVideo entry = save_sequence(scene.pred, dir.path());
    VideoPanopticSequence loaded = load_sequence(entry, scene.cats, dir.path());
    CHECK(loaded.video_id() == scene.pred.video_id());
    CHECK(loaded.segments() == scene.pred.segments());
    REQUIRE(loaded.frames().size() == scene.pred.frames().size());
    for (std::size_t t = 0; t < loaded.frames().size(); ++t)
      CHECK(loaded.frames()[t] == scene.pred.frames()[t]);
  }
}

TEST_CASE("ids beyond 24 bits cannot be written") {
  TempDir dir("plain");
  CategoryTable cats = make_cats({{1, false}});
  std::vector<IdRaster> frames;
  frames.push_back(make_raster(1, 1, {1u << 24}));
  VideoPanopticSequence seq = make_seq("big", std::move(frames), {{1u << 24, 1}}, cats);
  CHECK_THROWS_WITH_AS(save_sequence(seq, dir.path()),
                       doctest::Contains("exceeds 24-bit range"), Error);
}

TEST_CASE("empty frame list is rejected at construction") {
  CategoryTable cats = make_cats({{1, false}});
  CHECK_THROWS_AS(VideoPanopticSequence::create("none", {}, {}, cats), Error);
}

TEST_CASE("loader reports missing and malformed inputs") {
  TempDir dir("bad_inputs");
  CategoryTable cats = make_cats({{1, false}});

  ManifestVideo entry;
  entry.video_id = "v";
  entry.frame_raster_paths = {"missing.png"};
  entry.segments_sidecar_path = "segments.json";
  std::ofstream(dir.path() / "segments.json") << R"({"segments": []})";
  CHECK_THROWS_AS(load_sequence(entry, cats, dir.path()), Error);

  std::ofstream(dir.path() / "missing.png") << "not a png";
  CHECK_THROWS_WITH_AS(load_sequence(entry, cats, dir.path()), doctest::Contains("malformed PNG"),
                       Error);
}

TEST_CASE("loader rejects unmapped ids and inconsistent dimensions") {
  TempDir dir("bad_content");
  CategoryTable cats = make_cats({{1, false}, {2, true}});

  SUBCASE("unmapped id") {
    std::vector<IdRaster> frames;
    frames.push_back(make_raster(1, 1, {7}));
    VideoPanopticSequence good = make_seq("v", std::move(frames), {{7, 2}}, cats);
    ManifestVideo entry = save_sequence(good, dir.path());
    std::ofstream(dir.path() / entry.segments_sidecar_path) << R"({"segments": []})";
    CHECK_THROWS_WITH_AS(load_sequence(entry, cats, dir.path()),
                         doctest::Contains("unmapped id 7"), Error);
  }
  SUBCASE("inconsistent frame dimensions") {
    std::vector<IdRaster> a, b;
    a.push_back(make_raster(1, 2, {7, 7}));
    b.push_back(make_raster(2, 1, {7, 7}));
    ManifestVideo ea = save_sequence(make_seq("a", std::move(a), {{7, 2}}, cats), dir.path());
    ManifestVideo eb = save_sequence(make_seq("b", std::move(b), {{7, 2}}, cats), dir.path());
    ManifestVideo mixed;
    mixed.video_id = "mixed";
    mixed.frame_raster_paths = {ea.frame_raster_paths[0], eb.frame_raster_paths[0]};
    mixed.segments_sidecar_path = ea.segments_sidecar_path;
    CHECK_THROWS_WITH_AS(load_sequence(mixed, cats, dir.path()),
                         doctest::Contains("earlier frames"), Error);
  }
}

TEST_CASE("resize keeps the aspect ratio and the id inventory") {
  SUBCASE("1080x1920 to short side 720") {
    IdRaster raster(1080, 1920);
    IdRaster out = resize_short_side(raster, 720);
    CHECK(out.height() == 720);
    CHECK(out.width() == 1280);
  }
  SUBCASE("already at target is unchanged") {
    IdRaster raster(720, 1280);
    std::uint64_t state = 3;
    for (std::uint32_t& id : raster.ids()) id = splitmix64_next(state) % 4;
    IdRaster out = resize_short_side(raster, 720);
    CHECK(out == raster);
  }
  SUBCASE("constant field downscale") {
    IdRaster raster(4, 6, std::vector<std::uint32_t>(24, 7));
    IdRaster out = resize_short_side(raster, 2);
    CHECK(out.height() == 2);
    CHECK(out.width() == 3);
    for (std::uint32_t id : out.ids()) CHECK(id == 7);
  }
  SUBCASE("portrait orientation resizes the width") {
    IdRaster raster(1920, 1080);
    IdRaster out = resize_short_side(raster, 720);
    CHECK(out.height() == 1280);
    CHECK(out.width() == 720);
  }
  SUBCASE("no new ids appear (nearest neighbor), up and down") {
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
      GeneratedScene scene = generate(random_scenario(seed));
      for (int target : {2, 3, 5, 11, 17}) {
        VideoPanopticSequence resized = resize_short_side(scene.gt, target, scene.cats);
        std::set<std::uint32_t> original_ids, resized_ids;
        for (const IdRaster& f : scene.gt.frames())
          original_ids.insert(f.ids().begin(), f.ids().end());
        for (const IdRaster& f : resized.frames())
          resized_ids.insert(f.ids().begin(), f.ids().end());
        for (std::uint32_t id : resized_ids) CHECK(original_ids.count(id) == 1);
      }
    }
  }
  SUBCASE("target below one is a usage error") {
    IdRaster raster(4, 4);
    CHECK_THROWS_AS(resize_short_side(raster, 0), Error);
  }
}

TEST_CASE("logit file round trip is bit exact") {
  TempDir dir("lgt");
  const auto path = dir.path() / "volume.lgt";
  std::vector<float> values = random_floats(99, 2 * 4 * 4 * 3);
  LogitVolume volume = LogitVolume::create(2, 4, 4, {1, 2, 3}, values);
  write_logits(volume, path);
  LogitVolume loaded = read_logits(path);
  CHECK(loaded.frames() == 2);
  CHECK(loaded.class_index() == std::vector<std::int32_t>{1, 2, 3});
  REQUIRE(loaded.values().size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(std::memcmp(&loaded.values()[i], &values[i], sizeof(float)) == 0);
  }

  // Two writes of the same volume give identical bytes.
  const auto path2 = dir.path() / "volume2.lgt";
  write_logits(volume, path2);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(bytes_a == bytes_b);
}

TEST_CASE("logit file corruption is reported") {
  TempDir dir("lgt_bad");
  const auto path = dir.path() / "volume.lgt";
  LogitVolume volume = LogitVolume::create(1, 2, 2, {1}, {0.f, 1.f, 2.f, 3.f});
  write_logits(volume, path);

  SUBCASE("payload four bytes short") {
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 4);
    CHECK_THROWS_WITH_AS(read_logits(path), doctest::Contains("payload length mismatch"), Error);
  }
  SUBCASE("non-finite value in the payload") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-4, std::ios::end);
    const std::uint32_t nan_bits = 0x7fc00000u;
    f.write(reinterpret_cast<const char*>(&nan_bits), 4);
    f.close();
    CHECK_THROWS_WITH_AS(read_logits(path), doctest::Contains("non-finite logit"), Error);
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXXXXXX", 8);
    f.close();
    CHECK_THROWS_WITH_AS(read_logits(path), doctest::Contains("bad magic"), Error);
  }
  SUBCASE("volume constructor rejects NaN directly") {
    CHECK_THROWS_AS(LogitVolume::create(1, 1, 1, {1}, {std::nanf("")}), Error);
  }
  SUBCASE("duplicate class id") {
    CHECK_THROWS_AS(LogitVolume::create(1, 1, 1, {1, 1}, {0.f, 0.f}), Error);
  }
}

TEST_CASE("weight file round trip is bit exact") {
  TempDir dir("wgt");
  const auto path = dir.path() / "weights.wgt";
  std::map<std::string, Tensor> tensors;
  tensors["a"] = Tensor{{2, 2}, random_floats(7, 4)};
  tensors["b"] = Tensor{{3}, random_floats(8, 3)};
  WeightMap weights = WeightMap::create(std::move(tensors));
  write_weights(weights, path);
  WeightMap loaded = read_weights(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.tensors().at("a").shape == std::vector<std::int64_t>{2, 2});
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(std::memcmp(&loaded.tensors().at("a").data[i], &weights.tensors().at("a").data[i],
                      sizeof(float)) == 0);
}

TEST_CASE("weight file header errors") {
  TempDir dir("wgt_bad");
  const auto path = dir.path() / "weights.wgt";

  SUBCASE("duplicate tensor name") {
    // Hand-build an envelope with a duplicated tensor entry.
    std::string header = R"({"dtype":"f32","endianness":"little",)"
                         R"("tensors":[{"name":"a","shape":[1]},{"name":"a","shape":[1]}]})";
    std::ofstream out(path, std::ios::binary);
    out << "VPSWGT01";
    const std::uint32_t len = static_cast<std::uint32_t>(header.size());
    const unsigned char be[4] = {static_cast<unsigned char>(len >> 24),
                                 static_cast<unsigned char>(len >> 16),
                                 static_cast<unsigned char>(len >> 8),
                                 static_cast<unsigned char>(len)};
    out.write(reinterpret_cast<const char*>(be), 4);
    out << header;
    const float payload[2] = {1.f, 2.f};
    out.write(reinterpret_cast<const char*>(payload), sizeof(payload));
    out.close();
    CHECK_THROWS_WITH_AS(read_weights(path), doctest::Contains("duplicate tensor name"), Error);
  }
  SUBCASE("shape product does not match the data length") {
    CHECK_THROWS_WITH_AS(WeightMap::create({{"a", Tensor{{2, 3}, {1.f, 2.f}}}}),
                         doctest::Contains("shape product"), Error);
  }
  SUBCASE("unsorted tensor names") {
    std::string header = R"({"dtype":"f32","endianness":"little",)"
                         R"("tensors":[{"name":"b","shape":[1]},{"name":"a","shape":[1]}]})";
    std::ofstream out(path, std::ios::binary);
    out << "VPSWGT01";
    const std::uint32_t len = static_cast<std::uint32_t>(header.size());
    const unsigned char be[4] = {static_cast<unsigned char>(len >> 24),
                                 static_cast<unsigned char>(len >> 16),
                                 static_cast<unsigned char>(len >> 8),
                                 static_cast<unsigned char>(len)};
    out.write(reinterpret_cast<const char*>(be), 4);
    out << header;
    const float payload[2] = {1.f, 2.f};
    out.write(reinterpret_cast<const char*>(payload), sizeof(payload));
    out.close();
    CHECK_THROWS_WITH_AS(read_weights(path), doctest::Contains("not sorted"), Error);
  }
}

TEST_CASE("manifest and category table round trip") {
  TempDir dir("manifest");
  CategoryTable cats = make_cats({{1, false}, {2, true}});
  GeneratedScene scene = generate(random_scenario(123));
  std::filesystem::path manifest_path =
      save_dataset({scene.gt}, scene.cats, dir.path() / "ds", "toy");

  DatasetManifest manifest = load_manifest(manifest_path);
  CHECK(manifest.dataset_name == "toy");
  REQUIRE(manifest.videos.size() == 1);
  CategoryTable loaded_cats = load_category_table(manifest.base_dir / manifest.category_file);
  CHECK(loaded_cats.size() == scene.cats.size());
  std::vector<VideoPanopticSequence> seqs = load_all_sequences(manifest, loaded_cats);
  REQUIRE(seqs.size() == 1);
  CHECK(seqs[0].segments() == scene.gt.segments());
}

TEST_CASE("validate_video surfaces violations without throwing") {
  TempDir dir("lenient");
  CategoryTable cats = make_cats({{1, false}, {2, true}});
  std::vector<IdRaster> frames;
  frames.push_back(make_raster(1, 1, {7}));
  VideoPanopticSequence good = make_seq("v", std::move(frames), {{7, 2}}, cats);
  ManifestVideo entry = save_sequence(good, dir.path());
  std::ofstream(dir.path() / entry.segments_sidecar_path) << R"({"segments": []})";
  ValidationResult result = validate_video(entry, cats, dir.path());
  REQUIRE_FALSE(result.ok());
  CHECK(result.violations.front().code == "unmapped_id");
}
