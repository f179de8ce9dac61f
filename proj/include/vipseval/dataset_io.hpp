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
// On-disk formats
// ---------------
// Dataset manifest (UTF-8 JSON):
//   {"dataset_name": str, "category_file": path,
//    "videos": [{"video_id": str, "frame_raster_paths": [path, ...],
//                "segments_sidecar_path": path}, ...]}
//   Relative paths resolve against the manifest's directory.
//
// Category file (UTF-8 JSON):
//   {"categories": [{"id": int >= 1, "name": str, "is_thing": bool}, ...]}
//
// Frame rasters: 8-bit RGB PNG, segment id = R + 256*G + 65536*B (so ids
// above 2^24 - 1 are not representable). Id 0 (black) is void.
//
// Segments sidecar (UTF-8 JSON):
//   {"segments": [{"id": int, "category_id": int, "confidence": number?}, ...]}
//   "confidence" is optional (default 1.0) and only consumed by fusion.
//
// Logit file (.lgt): magic "VPSLGT01", 4-byte big-endian header length, a
// JSON header {"dims": {"t","h","w","c"}, "class_index": [...],
// "endianness": "little", "dtype": "f32"}, then t*h*w*c little-endian
// IEEE-754 binary32 values in (t, h, w, c) row-major order.
//
// Weight file (.wgt): magic "VPSWGT01", same envelope; header
// {"tensors": [{"name", "shape"}, ...], "endianness", "dtype"} with names
// sorted ascending, payload = tensors concatenated in that order.

#ifndef VIPSEVAL_DATASET_IO_HPP
#define VIPSEVAL_DATASET_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vipseval/core.hpp"

namespace vipseval {

struct ManifestVideo {
  std::string video_id;
  std::vector<std::filesystem::path> frame_raster_paths;
  std::filesystem::path segments_sidecar_path;
};

struct DatasetManifest {
  std::string dataset_name;
  std::filesystem::path category_file;
  std::vector<ManifestVideo> videos;
  // Directory the manifest was loaded from (or will be written to);
  // relative member paths resolve against it.
  std::filesystem::path base_dir;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

CategoryTable load_category_table(const std::filesystem::path& path);
void save_category_table(const CategoryTable& cats, const std::filesystem::path& path);

// Optional per-track confidences parsed from a sidecar; only meaningful for
// instance manifests fed to fusion.
struct SequenceWithConfidence {
  VideoPanopticSequence sequence;
  std::map<std::uint32_t, double> confidence;  // absent ids default to 1.0
};

// Decodes the video's PNG rasters and sidecar. The result always satisfies
// validate_sequence; missing files, malformed PNGs, unmapped ids and
// inconsistent dimensions are reported with path and location.
VideoPanopticSequence load_sequence(const ManifestVideo& video, const CategoryTable& cats,
                                    const std::filesystem::path& base_dir);
SequenceWithConfidence load_sequence_with_confidence(const ManifestVideo& video,
                                                     const CategoryTable& cats,
                                                     const std::filesystem::path& base_dir);

// Writes `<dir>/<video_id>/NNNNNN.png` rasters plus a segments sidecar and
// returns a manifest entry with paths relative to `dir`. Round trip through
// load_sequence is bit-exact. Confidences, when given, are embedded in the
// sidecar.
ManifestVideo save_sequence(const VideoPanopticSequence& seq, const std::filesystem::path& dir,
                            const std::map<std::uint32_t, double>* confidence = nullptr);

// Decodes the video's files and runs validate_sequence without the
// constructor's rejection, so every invariant violation comes back as data.
// Decode failures (missing file, malformed PNG, bad sidecar) still throw.
ValidationResult validate_video(const ManifestVideo& video, const CategoryTable& cats,
                                const std::filesystem::path& base_dir);

// Convenience: loads every video in the manifest (videos in manifest order).
std::vector<VideoPanopticSequence> load_all_sequences(const DatasetManifest& manifest,
                                                      const CategoryTable& cats);

// Writes a whole dataset (categories, rasters, sidecars, manifest.json)
// under `dir` and returns the manifest path.
std::filesystem::path save_dataset(const std::vector<VideoPanopticSequence>& seqs,
                                   const CategoryTable& cats, const std::filesystem::path& dir,
                                   const std::string& dataset_name);

// Scales so the short side equals `target`, long side rounded to nearest
// (minimum 1), labels resampled nearest-neighbor; no new ids appear.
IdRaster resize_short_side(const IdRaster& raster, int target);
VideoPanopticSequence resize_short_side(const VideoPanopticSequence& seq, int target,
                                        const CategoryTable& cats);

// T x H x W x C class scores from one model source. All values finite.
class LogitVolume {
 public:
  static LogitVolume create(int t, int h, int w, std::vector<std::int32_t> class_index,
                            std::vector<float> values);

  int frames() const { return t_; }
  int height() const { return h_; }
  int width() const { return w_; }
  int classes() const { return c_; }
  const std::vector<std::int32_t>& class_index() const { return class_index_; }
  const std::vector<float>& values() const { return values_; }

  std::size_t offset(int t, int y, int x) const {
    return ((static_cast<std::size_t>(t) * h_ + y) * w_ + x) * c_;
  }
  float at(int t, int y, int x, int c) const { return values_[offset(t, y, x) + c]; }

 private:
  LogitVolume() = default;
  int t_ = 0, h_ = 0, w_ = 0, c_ = 0;
  std::vector<std::int32_t> class_index_;
  std::vector<float> values_;
};

LogitVolume read_logits(const std::filesystem::path& path);
void write_logits(const LogitVolume& volume, const std::filesystem::path& path);

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // length = product of shape
};

// Named tensor collection; names unique, iteration order is ascending name.
class WeightMap {
 public:
  static WeightMap create(std::map<std::string, Tensor> tensors);

  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  std::size_t size() const { return tensors_.size(); }

 private:
  WeightMap() = default;
  std::map<std::string, Tensor> tensors_;
};

WeightMap read_weights(const std::filesystem::path& path);
void write_weights(const WeightMap& weights, const std::filesystem::path& path);

}  // namespace vipseval

#endif  // VIPSEVAL_DATASET_IO_HPP
