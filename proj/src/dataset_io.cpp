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

#include "vipseval/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "png_io.hpp"
#include "vipseval/error.hpp"

namespace vipseval {

namespace {

using nlohmann::json;

constexpr std::uint32_t kMaxEncodableId = (1u << 24) - 1;
constexpr char kLogitMagic[8] = {'V', 'P', 'S', 'L', 'G', 'T', '0', '1'};
constexpr char kWeightMagic[8] = {'V', 'P', 'S', 'W', 'G', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

json parse_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open ", what, " '", path.string(), "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw_data("malformed JSON in ", what, " '", path.string(), "'");
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '", path.string(), "' for writing");
  out << text;
  if (!out) throw_io("failed writing '", path.string(), "'");
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

const json& require(const json& j, const char* key, const char* context) {
  auto it = j.find(key);
  if (it == j.end()) throw_data(context, ": missing key '", key, "'");
  return *it;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  json j = parse_json_file(path, "manifest");
  DatasetManifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path() : ".";
  manifest.dataset_name = require(j, "dataset_name", "manifest").get<std::string>();
  manifest.category_file = require(j, "category_file", "manifest").get<std::string>();
  std::set<std::string> seen_ids;
  for (const json& v : require(j, "videos", "manifest")) {
    ManifestVideo video;
    video.video_id = require(v, "video_id", "manifest video").get<std::string>();
    if (!seen_ids.insert(video.video_id).second)
      throw_data("manifest '", path.string(), "': duplicate video id '", video.video_id, "'");
    for (const json& f : require(v, "frame_raster_paths", "manifest video"))
      video.frame_raster_paths.emplace_back(f.get<std::string>());
    if (video.frame_raster_paths.empty())
      throw_data("manifest '", path.string(), "': video '", video.video_id,
                 "' lists no frame paths");
    video.segments_sidecar_path =
        require(v, "segments_sidecar_path", "manifest video").get<std::string>();
    manifest.videos.push_back(std::move(video));
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json videos = json::array();
  for (const ManifestVideo& video : manifest.videos) {
    json frames = json::array();
    for (const auto& p : video.frame_raster_paths) frames.push_back(p.generic_string());
    videos.push_back({{"video_id", video.video_id},
                      {"frame_raster_paths", frames},
                      {"segments_sidecar_path", video.segments_sidecar_path.generic_string()}});
  }
  json j = {{"dataset_name", manifest.dataset_name},
            {"category_file", manifest.category_file.generic_string()},
            {"videos", videos}};
  write_text_file(path, j.dump(2) + "\n");
}

CategoryTable load_category_table(const std::filesystem::path& path) {
  json j = parse_json_file(path, "category file");
  std::vector<Category> entries;
  for (const json& c : require(j, "categories", "category file")) {
    Category cat;
    cat.id = require(c, "id", "category").get<std::int32_t>();
    cat.name = require(c, "name", "category").get<std::string>();
    cat.is_thing = require(c, "is_thing", "category").get<bool>();
    entries.push_back(std::move(cat));
  }
  return CategoryTable::create(std::move(entries));
}

void save_category_table(const CategoryTable& cats, const std::filesystem::path& path) {
  json list = json::array();
  for (const Category& c : cats.entries())
    list.push_back({{"id", c.id}, {"name", c.name}, {"is_thing", c.is_thing}});
  write_text_file(path, json{{"categories", list}}.dump(2) + "\n");
}

namespace {

IdRaster decode_raster(const std::filesystem::path& path) {
  pngio::Rgb8Image image = pngio::read_rgb8(path);
  std::vector<std::uint32_t> ids(static_cast<std::size_t>(image.height) * image.width);
  const std::uint8_t* px = image.pixels.data();
  for (std::size_t i = 0; i < ids.size(); ++i, px += 3) {
    ids[i] = static_cast<std::uint32_t>(px[0]) | (static_cast<std::uint32_t>(px[1]) << 8) |
             (static_cast<std::uint32_t>(px[2]) << 16);
  }
  return IdRaster(image.height, image.width, std::move(ids));
}

void encode_raster(const IdRaster& raster, const std::filesystem::path& path) {
  pngio::Rgb8Image image;
  image.height = raster.height();
  image.width = raster.width();
  image.pixels.resize(raster.pixel_count() * 3);
  std::uint8_t* px = image.pixels.data();
  for (std::uint32_t id : raster.ids()) {
    if (id > kMaxEncodableId)
      throw_data("id ", id, " exceeds 24-bit range and cannot be written to '", path.string(),
                 "'");
    px[0] = static_cast<std::uint8_t>(id & 0xff);
    px[1] = static_cast<std::uint8_t>((id >> 8) & 0xff);
    px[2] = static_cast<std::uint8_t>((id >> 16) & 0xff);
    px += 3;
  }
  pngio::write_rgb8(image, path);
}

struct SidecarData {
  std::map<std::uint32_t, std::int32_t> segments;
  std::map<std::uint32_t, double> confidence;
};

SidecarData load_sidecar(const std::filesystem::path& path) {
  json j = parse_json_file(path, "segments sidecar");
  SidecarData data;
  for (const json& s : require(j, "segments", "segments sidecar")) {
    auto id = require(s, "id", "sidecar segment").get<std::int64_t>();
    auto category_id = require(s, "category_id", "sidecar segment").get<std::int32_t>();
    if (id < 1 || id > static_cast<std::int64_t>(kMaxEncodableId))
      throw_data("sidecar '", path.string(), "': segment id ", id, " outside [1, 2^24-1]");
    auto key = static_cast<std::uint32_t>(id);
    if (!data.segments.emplace(key, category_id).second)
      throw_data("sidecar '", path.string(), "': duplicate segment id ", id);
    if (auto it = s.find("confidence"); it != s.end()) {
      double conf = it->get<double>();
      if (!(conf >= 0.0 && conf <= 1.0))
        throw_data("sidecar '", path.string(), "': confidence for id ", id, " outside [0,1]");
      data.confidence.emplace(key, conf);
    }
  }
  return data;
}

}  // namespace

SequenceWithConfidence load_sequence_with_confidence(const ManifestVideo& video,
                                                     const CategoryTable& cats,
                                                     const std::filesystem::path& base_dir) {
  SidecarData sidecar = load_sidecar(resolve(base_dir, video.segments_sidecar_path));
  std::vector<IdRaster> frames;
  frames.reserve(video.frame_raster_paths.size());
  for (const auto& rel : video.frame_raster_paths) {
    std::filesystem::path p = resolve(base_dir, rel);
    frames.push_back(decode_raster(p));
    if (frames.size() > 1 && (frames.back().height() != frames.front().height() ||
                              frames.back().width() != frames.front().width()))
      throw_data("video '", video.video_id, "': frame '", p.string(), "' is ",
                 frames.back().height(), "x", frames.back().width(), " but earlier frames are ",
                 frames.front().height(), "x", frames.front().width());
  }
  SequenceWithConfidence out{
      VideoPanopticSequence::create(video.video_id, std::move(frames),
                                    std::move(sidecar.segments), cats),
      std::move(sidecar.confidence)};
  return out;
}

VideoPanopticSequence load_sequence(const ManifestVideo& video, const CategoryTable& cats,
                                    const std::filesystem::path& base_dir) {
  return load_sequence_with_confidence(video, cats, base_dir).sequence;
}

ValidationResult validate_video(const ManifestVideo& video, const CategoryTable& cats,
                                const std::filesystem::path& base_dir) {
  SidecarData sidecar = load_sidecar(resolve(base_dir, video.segments_sidecar_path));
  std::vector<IdRaster> frames;
  frames.reserve(video.frame_raster_paths.size());
  for (const auto& rel : video.frame_raster_paths)
    frames.push_back(decode_raster(resolve(base_dir, rel)));
  return validate_sequence(frames, sidecar.segments, cats);
}

ManifestVideo save_sequence(const VideoPanopticSequence& seq, const std::filesystem::path& dir,
                            const std::map<std::uint32_t, double>* confidence) {
  std::filesystem::path video_dir = dir / seq.video_id();
  std::error_code ec;
  std::filesystem::create_directories(video_dir, ec);
  if (ec) throw_io("cannot create directory '", video_dir.string(), "': ", ec.message());

  ManifestVideo entry;
  entry.video_id = seq.video_id();
  char name[32];
  for (int t = 0; t < seq.frame_count(); ++t) {
    std::snprintf(name, sizeof(name), "%06d.png", t);
    encode_raster(seq.frames()[t], video_dir / name);
    entry.frame_raster_paths.push_back(std::filesystem::path(seq.video_id()) / name);
  }

  json segments = json::array();
  for (const auto& [id, category_id] : seq.segments()) {
    json s = {{"id", id}, {"category_id", category_id}};
    if (confidence) {
      if (auto it = confidence->find(id); it != confidence->end()) s["confidence"] = it->second;
    }
    segments.push_back(std::move(s));
  }
  write_text_file(video_dir / "segments.json", json{{"segments", segments}}.dump(2) + "\n");
  entry.segments_sidecar_path = std::filesystem::path(seq.video_id()) / "segments.json";
  return entry;
}

std::vector<VideoPanopticSequence> load_all_sequences(const DatasetManifest& manifest,
                                                      const CategoryTable& cats) {
  std::vector<VideoPanopticSequence> seqs;
  seqs.reserve(manifest.videos.size());
  for (const ManifestVideo& video : manifest.videos)
    seqs.push_back(load_sequence(video, cats, manifest.base_dir));
  return seqs;
}

std::filesystem::path save_dataset(const std::vector<VideoPanopticSequence>& seqs,
                                   const CategoryTable& cats, const std::filesystem::path& dir,
                                   const std::string& dataset_name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory '", dir.string(), "': ", ec.message());

  DatasetManifest manifest;
  manifest.dataset_name = dataset_name;
  manifest.base_dir = dir;
  manifest.category_file = "categories.json";
  save_category_table(cats, dir / "categories.json");
  for (const VideoPanopticSequence& seq : seqs)
    manifest.videos.push_back(save_sequence(seq, dir));
  std::filesystem::path manifest_path = dir / "manifest.json";
  save_manifest(manifest, manifest_path);
  return manifest_path;
}

IdRaster resize_short_side(const IdRaster& raster, int target) {
  if (target < 1) throw_usage("resize target must be >= 1, got ", target);
  const std::int64_t src_h = raster.height();
  const std::int64_t src_w = raster.width();
  std::int64_t dst_h, dst_w;
  if (src_h <= src_w) {
    dst_h = target;
    // round(src_w * target / src_h), floor((2ab + c) / 2c) form keeps the
    // arithmetic exact.
    dst_w = std::max<std::int64_t>(1, (2 * src_w * target + src_h) / (2 * src_h));
  } else {
    dst_w = target;
    dst_h = std::max<std::int64_t>(1, (2 * src_h * target + src_w) / (2 * src_w));
  }
  if (dst_h == src_h && dst_w == src_w) return raster;

  IdRaster out(static_cast<int>(dst_h), static_cast<int>(dst_w));
  // Nearest-neighbor at pixel centers: src = floor((dst + 0.5) * src / dst),
  // evaluated in integers.
  std::vector<int> col_map(static_cast<std::size_t>(dst_w));
  for (std::int64_t x = 0; x < dst_w; ++x)
    col_map[x] = static_cast<int>(((2 * x + 1) * src_w) / (2 * dst_w));
  for (std::int64_t y = 0; y < dst_h; ++y) {
    const int sy = static_cast<int>(((2 * y + 1) * src_h) / (2 * dst_h));
    for (std::int64_t x = 0; x < dst_w; ++x)
      out.set(static_cast<int>(y), static_cast<int>(x), raster.at(sy, col_map[x]));
  }
  return out;
}

VideoPanopticSequence resize_short_side(const VideoPanopticSequence& seq, int target,
                                        const CategoryTable& cats) {
  std::vector<IdRaster> frames;
  frames.reserve(seq.frames().size());
  for (const IdRaster& raster : seq.frames()) frames.push_back(resize_short_side(raster, target));
  return VideoPanopticSequence::create(seq.video_id(), std::move(frames), seq.segments(), cats);
}

LogitVolume LogitVolume::create(int t, int h, int w, std::vector<std::int32_t> class_index,
                                std::vector<float> values) {
  if (t < 1 || h < 1 || w < 1 || class_index.empty())
    throw_data("logit volume dimensions must be >= 1, got ", t, "x", h, "x", w, "x",
               class_index.size());
  std::set<std::int32_t> unique_ids;
  for (std::int32_t id : class_index) {
    if (id < 1) throw_data("logit volume: class id ", id, " must be >= 1");
    if (!unique_ids.insert(id).second) throw_data("logit volume: duplicate class id ", id);
  }
  const std::size_t expected = static_cast<std::size_t>(t) * h * w * class_index.size();
  if (values.size() != expected)
    throw_data("logit volume: value count ", values.size(), " does not match dims (expected ",
               expected, ")");
  for (float v : values)
    if (!std::isfinite(v)) throw_data("non-finite logit");
  LogitVolume volume;
  volume.t_ = t;
  volume.h_ = h;
  volume.w_ = w;
  volume.c_ = static_cast<int>(class_index.size());
  volume.class_index_ = std::move(class_index);
  volume.values_ = std::move(values);
  return volume;
}

namespace {

// Shared "magic + 4-byte big-endian header length + JSON header + payload"
// envelope for the two binary formats.
void write_envelope(const std::filesystem::path& path, const char (&magic)[8],
                    const json& header, const float* payload, std::size_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '", path.string(), "' for writing");
  std::string header_text = header.dump();
  if (header_text.size() > 0x7fffffff) throw_internal("header too large");
  const auto len = static_cast<std::uint32_t>(header_text.size());
  const std::uint8_t len_be[4] = {static_cast<std::uint8_t>(len >> 24),
                                  static_cast<std::uint8_t>(len >> 16),
                                  static_cast<std::uint8_t>(len >> 8),
                                  static_cast<std::uint8_t>(len)};
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(len_be), 4);
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(payload),
              static_cast<std::streamsize>(count * sizeof(float)));
  } else {
    std::vector<char> buf(count * 4);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, &payload[i], 4);
      buf[i * 4 + 0] = static_cast<char>(bits & 0xff);
      buf[i * 4 + 1] = static_cast<char>((bits >> 8) & 0xff);
      buf[i * 4 + 2] = static_cast<char>((bits >> 16) & 0xff);
      buf[i * 4 + 3] = static_cast<char>((bits >> 24) & 0xff);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw_io("failed writing '", path.string(), "'");
}

struct Envelope {
  json header;
  std::vector<float> payload;
};

Envelope read_envelope(const std::filesystem::path& path, const char (&magic)[8]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '", path.string(), "'");
  char file_magic[8];
  if (!in.read(file_magic, 8) || std::memcmp(file_magic, magic, 8) != 0)
    throw_data("'", path.string(), "': bad magic, expected ", std::string(magic, 8));
  std::uint8_t len_be[4];
  if (!in.read(reinterpret_cast<char*>(len_be), 4))
    throw_data("'", path.string(), "': truncated header length");
  const std::uint32_t len = (static_cast<std::uint32_t>(len_be[0]) << 24) |
                            (static_cast<std::uint32_t>(len_be[1]) << 16) |
                            (static_cast<std::uint32_t>(len_be[2]) << 8) |
                            static_cast<std::uint32_t>(len_be[3]);
  if (len > (1u << 30)) throw_data("'", path.string(), "': implausible header length ", len);
  std::string header_text(len, '\0');
  if (!in.read(header_text.data(), len)) throw_data("'", path.string(), "': truncated header");

  Envelope env;
  env.header = json::parse(header_text, nullptr, false);
  if (env.header.is_discarded()) throw_data("'", path.string(), "': malformed JSON header");
  if (require(env.header, "endianness", "header").get<std::string>() != "little")
    throw_data("'", path.string(), "': unsupported endianness (only \"little\")");
  if (require(env.header, "dtype", "header").get<std::string>() != "f32")
    throw_data("'", path.string(), "': unsupported dtype (only \"f32\")");

  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() % 4 != 0)
    throw_data("'", path.string(), "': payload length mismatch (", raw.size(),
               " bytes is not a multiple of 4)");
  env.payload.resize(raw.size() / 4);
  for (std::size_t i = 0; i < env.payload.size(); ++i) {
    std::uint32_t bits = static_cast<std::uint8_t>(raw[i * 4 + 0]) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(raw[i * 4 + 1])) << 8) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(raw[i * 4 + 2])) << 16) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(raw[i * 4 + 3])) << 24);
    std::memcpy(&env.payload[i], &bits, 4);
  }
  return env;
}

}  // namespace

LogitVolume read_logits(const std::filesystem::path& path) {
  Envelope env = read_envelope(path, kLogitMagic);
  const json& dims = require(env.header, "dims", "logit header");
  const int t = require(dims, "t", "logit dims").get<int>();
  const int h = require(dims, "h", "logit dims").get<int>();
  const int w = require(dims, "w", "logit dims").get<int>();
  const int c = require(dims, "c", "logit dims").get<int>();
  auto class_index =
      require(env.header, "class_index", "logit header").get<std::vector<std::int32_t>>();
  if (static_cast<int>(class_index.size()) != c)
    throw_data("'", path.string(), "': class_index length ", class_index.size(),
               " does not match c=", c);
  const std::size_t expected =
      static_cast<std::size_t>(t) * h * w * static_cast<std::size_t>(c);
  if (env.payload.size() != expected)
    throw_data("'", path.string(), "': payload length mismatch (", env.payload.size(),
               " values, expected ", expected, ")");
  try {
    return LogitVolume::create(t, h, w, std::move(class_index), std::move(env.payload));
  } catch (const Error& e) {
    throw_data("'", path.string(), "': ", e.what());
  }
}

void write_logits(const LogitVolume& volume, const std::filesystem::path& path) {
  json header = {{"dims",
                  {{"t", volume.frames()},
                   {"h", volume.height()},
                   {"w", volume.width()},
                   {"c", volume.classes()}}},
                 {"class_index", volume.class_index()},
                 {"endianness", "little"},
                 {"dtype", "f32"}};
  write_envelope(path, kLogitMagic, header, volume.values().data(), volume.values().size());
}

WeightMap WeightMap::create(std::map<std::string, Tensor> tensors) {
  for (const auto& [name, tensor] : tensors) {
    if (name.empty()) throw_data("weight map: empty tensor name");
    if (tensor.shape.empty())
      throw_data("weight map: tensor '", name, "' has an empty shape (scalars are [1])");
    std::int64_t count = 1;
    for (std::int64_t d : tensor.shape) {
      if (d < 1) throw_data("weight map: tensor '", name, "' has non-positive dimension ", d);
      count *= d;
    }
    if (static_cast<std::int64_t>(tensor.data.size()) != count)
      throw_data("weight map: tensor '", name, "' has ", tensor.data.size(),
                 " values but shape product is ", count);
    for (float v : tensor.data)
      if (!std::isfinite(v)) throw_data("weight map: non-finite value in tensor '", name, "'");
  }
  WeightMap weights;
  weights.tensors_ = std::move(tensors);
  return weights;
}

WeightMap read_weights(const std::filesystem::path& path) {
  Envelope env = read_envelope(path, kWeightMagic);
  std::map<std::string, Tensor> tensors;
  std::string prev_name;
  std::size_t offset = 0;
  for (const json& t : require(env.header, "tensors", "weight header")) {
    std::string name = require(t, "name", "weight tensor").get<std::string>();
    if (!prev_name.empty()) {
      if (name == prev_name) throw_data("'", path.string(), "': duplicate tensor name '", name, "'");
      if (name < prev_name)
        throw_data("'", path.string(), "': tensor names not sorted ('", name, "' after '",
                   prev_name, "')");
    }
    prev_name = name;
    Tensor tensor;
    tensor.shape = require(t, "shape", "weight tensor").get<std::vector<std::int64_t>>();
    if (tensor.shape.empty())
      throw_data("'", path.string(), "': tensor '", name, "' has an empty shape");
    std::int64_t count = 1;
    for (std::int64_t d : tensor.shape) {
      if (d < 1) throw_data("'", path.string(), "': tensor '", name, "' has dimension ", d);
      count *= d;
    }
    if (offset + count > env.payload.size())
      throw_data("'", path.string(), "': payload length mismatch (tensor '", name,
                 "' overruns the payload)");
    tensor.data.assign(env.payload.begin() + static_cast<std::ptrdiff_t>(offset),
                       env.payload.begin() + static_cast<std::ptrdiff_t>(offset + count));
    offset += static_cast<std::size_t>(count);
    tensors.emplace(std::move(name), std::move(tensor));
  }
  if (offset != env.payload.size())
    throw_data("'", path.string(), "': payload length mismatch (", env.payload.size() - offset,
               " trailing values)");
  try {
    return WeightMap::create(std::move(tensors));
  } catch (const Error& e) {
    throw_data("'", path.string(), "': ", e.what());
  }
}

void write_weights(const WeightMap& weights, const std::filesystem::path& path) {
  json tensor_list = json::array();
  std::vector<float> payload;
  for (const auto& [name, tensor] : weights.tensors()) {
    tensor_list.push_back({{"name", name}, {"shape", tensor.shape}});
    payload.insert(payload.end(), tensor.data.begin(), tensor.data.end());
  }
  json header = {{"tensors", tensor_list}, {"endianness", "little"}, {"dtype", "f32"}};
  write_envelope(path, kWeightMagic, header, payload.data(), payload.size());
}

}  // namespace vipseval
