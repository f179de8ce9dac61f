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

#include "vipseval.h"

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vipseval/convert.hpp"
#include "vipseval/core.hpp"
#include "vipseval/dataset_io.hpp"
#include "vipseval/ema.hpp"
#include "vipseval/error.hpp"
#include "vipseval/fusion.hpp"
#include "vipseval/metrics_stq.hpp"
#include "vipseval/metrics_vpq.hpp"
#include "vipseval/querydecode.hpp"
#include "vipseval/reports.hpp"
#include "vipseval/synthgen.hpp"
#include "vipseval/threading.hpp"

struct vps_report {
  std::string json_text;
  nlohmann::json doc;
};

namespace {

using nlohmann::json;
using namespace vipseval;

thread_local std::string g_last_error;

vps_status status_from(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return VPS_ERROR_USAGE;
    case ErrorKind::kData: return VPS_ERROR_DATA;
    case ErrorKind::kIo: return VPS_ERROR_IO;
    case ErrorKind::kInternal: return VPS_ERROR_INTERNAL;
  }
  return VPS_ERROR_INTERNAL;
}

template <class Fn>
vps_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VPS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VPS_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return VPS_ERROR_INTERNAL;
  }
}

void require_arg(const void* p, const char* name) {
  if (!p) throw_usage("argument '", name, "' must not be null");
}

vps_report* make_report(std::string text) {
  auto* report = new vps_report;
  report->json_text = std::move(text);
  report->doc = json::parse(report->json_text);
  return report;
}

struct LoadedEvalInputs {
  CategoryTable cats;
  std::vector<VideoPanopticSequence> gt;
  std::vector<VideoPanopticSequence> pred;
};

std::filesystem::path resolved_category_file(const DatasetManifest& manifest) {
  return manifest.category_file.is_absolute() ? manifest.category_file
                                              : manifest.base_dir / manifest.category_file;
}

// The ground-truth manifest's category table governs both sides.
LoadedEvalInputs load_eval_inputs(const char* gt_manifest, const char* pred_manifest,
                                  int resize_short_side_target) {
  DatasetManifest gt_m = load_manifest(gt_manifest);
  DatasetManifest pred_m = load_manifest(pred_manifest);
  CategoryTable cats = load_category_table(resolved_category_file(gt_m));
  std::vector<VideoPanopticSequence> gt = load_all_sequences(gt_m, cats);
  std::vector<VideoPanopticSequence> pred = load_all_sequences(pred_m, cats);
  if (resize_short_side_target > 0) {
    for (auto& seq : gt) seq = resize_short_side(seq, resize_short_side_target, cats);
    for (auto& seq : pred) seq = resize_short_side(seq, resize_short_side_target, cats);
  }
  return LoadedEvalInputs{std::move(cats), std::move(gt), std::move(pred)};
}

std::string default_name(const char* run_name, const char* fallback_path) {
  if (run_name && run_name[0]) return run_name;
  return std::filesystem::path(fallback_path).parent_path().filename().string();
}

}  // namespace

extern "C" {

const char* vps_version(void) { return vipseval::kToolVersion; }

const char* vps_last_error(void) { return g_last_error.c_str(); }

void vps_string_free(char* text) { delete[] text; }

void vps_report_free(vps_report* report) { delete report; }

const char* vps_report_json(const vps_report* report) {
  return report ? report->json_text.c_str() : "";
}

vps_status vps_report_number(const vps_report* report, const char* json_pointer,
                             double* out_value) {
  return guarded([&] {
    require_arg(report, "report");
    require_arg(json_pointer, "json_pointer");
    require_arg(out_value, "out_value");
    const json& node = report->doc.at(json::json_pointer(json_pointer));
    if (!node.is_number()) throw_data("'", json_pointer, "' is not a number");
    *out_value = node.get<double>();
  });
}

vps_status vps_report_bool(const vps_report* report, const char* json_pointer, int* out_value) {
  return guarded([&] {
    require_arg(report, "report");
    require_arg(json_pointer, "json_pointer");
    require_arg(out_value, "out_value");
    const json& node = report->doc.at(json::json_pointer(json_pointer));
    if (!node.is_boolean()) throw_data("'", json_pointer, "' is not a boolean");
    *out_value = node.get<bool>() ? 1 : 0;
  });
}

vps_status vps_report_save(const vps_report* report, const char* path) {
  return guarded([&] {
    require_arg(report, "report");
    require_arg(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot open '", path, "' for writing");
    out << report->json_text;
    if (!out) throw_io("failed writing '", path, "'");
  });
}

vps_status vps_eval_vpq(const char* gt_manifest, const char* pred_manifest, const int* windows,
                        size_t window_count, int threads, int resize_short_side,
                        int void_pred_counts_as_fp, const char* run_name,
                        vps_report** out_report) {
  return guarded([&] {
    require_arg(gt_manifest, "gt_manifest");
    require_arg(pred_manifest, "pred_manifest");
    require_arg(windows, "windows");
    require_arg(out_report, "out_report");
    if (window_count == 0) throw_usage("at least one window size is required");

    LoadedEvalInputs inputs = load_eval_inputs(gt_manifest, pred_manifest, resize_short_side);
    VpqOptions opts;
    opts.count_void_pred_as_fp = void_pred_counts_as_fp != 0;
    opts.threads = resolve_threads(threads);
    std::vector<int> window_list(windows, windows + window_count);
    VpqReport report = vpq(inputs.gt, inputs.pred, window_list, inputs.cats, opts);

    EvalRunInfo info;
    info.name = default_name(run_name, pred_manifest);
    info.gt_source = gt_manifest;
    info.pred_source = pred_manifest;
    info.threads = opts.threads;
    info.resize_short_side = resize_short_side > 0 ? resize_short_side : 0;
    *out_report =
        make_report(vpq_report_to_json(report, window_list, opts.count_void_pred_as_fp, info));
  });
}

vps_status vps_eval_stq(const char* gt_manifest, const char* pred_manifest, int threads,
                        int resize_short_side, const char* run_name, vps_report** out_report) {
  return guarded([&] {
    require_arg(gt_manifest, "gt_manifest");
    require_arg(pred_manifest, "pred_manifest");
    require_arg(out_report, "out_report");

    LoadedEvalInputs inputs = load_eval_inputs(gt_manifest, pred_manifest, resize_short_side);
    StqOptions opts;
    opts.threads = resolve_threads(threads);
    StqReport report = stq(inputs.gt, inputs.pred, inputs.cats, opts);

    EvalRunInfo info;
    info.name = default_name(run_name, pred_manifest);
    info.gt_source = gt_manifest;
    info.pred_source = pred_manifest;
    info.threads = opts.threads;
    info.resize_short_side = resize_short_side > 0 ? resize_short_side : 0;
    *out_report = make_report(stq_report_to_json(report, info));
  });
}

vps_status vps_aggregate_vpq(const double* window_scores, size_t count, double* out_mean) {
  return guarded([&] {
    require_arg(window_scores, "window_scores");
    require_arg(out_mean, "out_mean");
    *out_mean = aggregate_vpq(std::span<const double>(window_scores, count));
  });
}

vps_status vps_validate_dataset(const char* manifest, vps_report** out_report) {
  return guarded([&] {
    require_arg(manifest, "manifest");
    require_arg(out_report, "out_report");
    DatasetManifest m = load_manifest(manifest);
    CategoryTable cats = load_category_table(resolved_category_file(m));

    json video_reports = json::array();
    bool all_ok = true;
    for (const ManifestVideo& video : m.videos) {
      json entry;
      entry["video_id"] = video.video_id;
      ValidationResult result = validate_video(video, cats, m.base_dir);
      all_ok = all_ok && result.ok();
      entry["ok"] = result.ok();
      json violations = json::array();
      for (const Violation& v : result.violations)
        violations.push_back({{"code", v.code},
                              {"message", v.message},
                              {"frame", v.frame},
                              {"y", v.y},
                              {"x", v.x}});
      entry["violations"] = std::move(violations);
      video_reports.push_back(std::move(entry));
    }
    json j = {{"schema_version", kReportSchemaVersion},
              {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
              {"kind", "validation_report"},
              {"manifest", manifest},
              {"ok", all_ok},
              {"videos", video_reports}};
    *out_report = make_report(j.dump(2) + "\n");
  });
}

vps_status vps_convert_dataset(const char* manifest, const char* mode, const char* out_dir) {
  return guarded([&] {
    require_arg(manifest, "manifest");
    require_arg(mode, "mode");
    require_arg(out_dir, "out_dir");
    const std::string mode_str = mode;
    if (mode_str != "semantic" && mode_str != "instance")
      throw_usage("mode must be 'semantic' or 'instance', got '", mode_str, "'");

    DatasetManifest m = load_manifest(manifest);
    CategoryTable cats = load_category_table(resolved_category_file(m));

    std::vector<VideoPanopticSequence> converted;
    for (const ManifestVideo& video : m.videos) {
      VideoPanopticSequence seq = load_sequence(video, cats, m.base_dir);
      if (mode_str == "semantic") {
        SemanticSequence semantic = to_semantic(seq, cats);
        // Category-id rasters re-enter the panoptic container: each present
        // category becomes one segment whose id is the category id.
        std::map<std::uint32_t, std::int32_t> segments;
        for (const IdRaster& frame : semantic.frames())
          for (std::uint32_t id : frame.ids())
            if (id != kVoidId) segments.emplace(id, static_cast<std::int32_t>(id));
        converted.push_back(VideoPanopticSequence::create(
            semantic.video_id(), semantic.frames(), std::move(segments), cats));
      } else {
        InstanceSequence instance = to_instance(seq, cats);
        converted.push_back(VideoPanopticSequence::create(
            instance.video_id(), instance.frames(),
            std::map<std::uint32_t, std::int32_t>(instance.instances().begin(),
                                                  instance.instances().end()),
            cats));
      }
    }
    save_dataset(converted, cats, out_dir, m.dataset_name + "_" + mode_str);
  });
}

vps_status vps_resize_dataset(const char* manifest, int target_short_side, const char* out_dir) {
  return guarded([&] {
    require_arg(manifest, "manifest");
    require_arg(out_dir, "out_dir");
    if (target_short_side < 1) throw_usage("resize target must be >= 1");
    DatasetManifest m = load_manifest(manifest);
    CategoryTable cats = load_category_table(resolved_category_file(m));
    std::vector<VideoPanopticSequence> resized;
    for (const ManifestVideo& video : m.videos)
      resized.push_back(
          resize_short_side(load_sequence(video, cats, m.base_dir), target_short_side, cats));
    save_dataset(resized, cats, out_dir, m.dataset_name + "_resized");
  });
}

vps_status vps_fuse(const char* const* logit_paths, size_t logit_count, const double* weights,
                    const char* instance_manifest, const char* video_id, long min_area,
                    double overlap_keep, const char* out_dir) {
  return guarded([&] {
    require_arg(logit_paths, "logit_paths");
    require_arg(instance_manifest, "instance_manifest");
    require_arg(out_dir, "out_dir");
    if (logit_count == 0) throw_usage("at least one logit source is required");

    DatasetManifest m = load_manifest(instance_manifest);
    CategoryTable cats = load_category_table(
        m.category_file.is_absolute() ? m.category_file : m.base_dir / m.category_file);

    const ManifestVideo* selected = nullptr;
    if (video_id && video_id[0]) {
      for (const ManifestVideo& video : m.videos)
        if (video.video_id == video_id) selected = &video;
      if (!selected) throw_data("video id '", video_id, "' not found in the instance manifest");
    } else if (m.videos.size() == 1) {
      selected = &m.videos.front();
    } else {
      throw_usage("instance manifest holds ", m.videos.size(),
                  " videos; pick one with a video id");
    }

    SequenceWithConfidence inst = load_sequence_with_confidence(*selected, cats, m.base_dir);

    std::vector<LogitVolume> sources;
    sources.reserve(logit_count);
    for (size_t i = 0; i < logit_count; ++i) {
      require_arg(logit_paths[i], "logit_paths[i]");
      sources.push_back(read_logits(logit_paths[i]));
    }
    // The ensemble runs on the stuff classes only.
    std::vector<std::int32_t> stuff_ids;
    for (std::int32_t id : sources.front().class_index())
      if (cats.contains(id) && !cats.is_thing(id)) stuff_ids.push_back(id);
    if (stuff_ids.empty()) throw_data("logit sources carry no stuff class");
    std::vector<LogitVolume> stuff_sources;
    stuff_sources.reserve(sources.size());
    for (const LogitVolume& source : sources) stuff_sources.push_back(select_classes(source, stuff_ids));

    std::span<const double> weight_span;
    if (weights) weight_span = std::span<const double>(weights, logit_count);
    LogitVolume probs = average_softmax(stuff_sources, weight_span);

    if (probs.frames() != inst.sequence.frame_count() ||
        probs.height() != inst.sequence.height() || probs.width() != inst.sequence.width())
      throw_data("logit volume dims do not match the instance video '", selected->video_id, "'");

    // Thing rasters become per-frame masks with the sidecar confidences;
    // stuff segments in a panoptic manifest are simply not instances and
    // fall to the ensembled fill.
    std::vector<std::vector<FrameInstanceMask>> instances(inst.sequence.frame_count());
    for (int t = 0; t < inst.sequence.frame_count(); ++t) {
      std::map<std::uint32_t, FrameInstanceMask> masks;
      const auto& ids = inst.sequence.frames()[t].ids();
      for (std::size_t px = 0; px < ids.size(); ++px) {
        if (ids[px] == kVoidId) continue;
        const std::int32_t category_id = inst.sequence.segments().at(ids[px]);
        if (!cats.is_thing(category_id)) continue;
        auto [it, inserted] = masks.try_emplace(ids[px]);
        if (inserted) {
          it->second.track_id = ids[px];
          it->second.category_id = category_id;
          auto conf = inst.confidence.find(ids[px]);
          it->second.confidence = conf != inst.confidence.end() ? conf->second : 1.0;
        }
        it->second.pixels.push_back(static_cast<std::uint32_t>(px));
      }
      for (auto& [id, mask] : masks) instances[t].push_back(std::move(mask));
    }

    MergeParams params;
    params.min_area = min_area;
    params.overlap_keep = overlap_keep;
    VideoPanopticSequence fused =
        merge_panoptic(probs, instances, params, cats, selected->video_id);
    save_dataset({fused}, cats, out_dir, m.dataset_name + "_fused");
  });
}

vps_status vps_decode(const char* queries_path, const char* features_path,
                      const char* categories_path, double tau, int normalize,
                      const char* video_id, const char* out_dir) {
  return guarded([&] {
    require_arg(queries_path, "queries_path");
    require_arg(features_path, "features_path");
    require_arg(categories_path, "categories_path");
    require_arg(out_dir, "out_dir");

    CategoryTable cats = load_category_table(categories_path);
    WeightMap bundle = read_weights(queries_path);
    auto find_tensor = [&](const char* name) -> const Tensor& {
      auto it = bundle.tensors().find(name);
      if (it == bundle.tensors().end())
        throw_data("'", queries_path, "': missing tensor '", name, "'");
      return it->second;
    };
    const Tensor& q = find_tensor("queries");
    if (q.shape.size() != 2)
      throw_data("'", queries_path, "': tensor 'queries' must be rank 2 [N, D]");
    const int n = static_cast<int>(q.shape[0]);
    const int dims = static_cast<int>(q.shape[1]);
    const Tensor& kinds = find_tensor("query_kinds");
    const Tensor& categories = find_tensor("query_categories");
    if (kinds.data.size() != static_cast<std::size_t>(n) ||
        categories.data.size() != static_cast<std::size_t>(n))
      throw_data("'", queries_path, "': query metadata tensors must hold ", n, " entries");

    std::vector<QueryMeta> meta(n);
    for (int i = 0; i < n; ++i) {
      const float kind = kinds.data[i];
      if (kind != 0.0f && kind != 1.0f)
        throw_data("'", queries_path, "': query_kinds[", i, "] must be 0 or 1");
      meta[i].kind = kind == 1.0f ? QueryKind::kInstance : QueryKind::kSemanticClass;
      meta[i].category_id = static_cast<std::int32_t>(categories.data[i]);
    }
    QueryMatrix queries = QueryMatrix::create(n, dims, q.data, std::move(meta));

    LogitVolume raw = read_logits(features_path);
    FeatureVolume features = FeatureVolume::create(raw.frames(), raw.height(), raw.width(),
                                                   raw.classes(), raw.values());

    DecodeOptions opts;
    opts.threshold = tau;
    opts.normalize = normalize != 0;
    AssignmentVolume assignment = decode_masks(queries, features, opts);
    VideoPanopticSequence decoded = assignment_to_panoptic(
        assignment, queries, cats, video_id && video_id[0] ? video_id : "decoded");
    save_dataset({decoded}, cats, out_dir, "decoded");
  });
}

vps_status vps_ema(const char* const* snapshot_paths, size_t snapshot_count, double decay,
                   const char* out_path) {
  return guarded([&] {
    require_arg(snapshot_paths, "snapshot_paths");
    require_arg(out_path, "out_path");
    if (snapshot_count == 0) throw_usage("ema requires at least one snapshot");
    std::vector<WeightMap> snapshots;
    snapshots.reserve(snapshot_count);
    for (size_t i = 0; i < snapshot_count; ++i) {
      require_arg(snapshot_paths[i], "snapshot_paths[i]");
      snapshots.push_back(read_weights(snapshot_paths[i]));
    }
    write_weights(ema(snapshots, decay), out_path);
  });
}

vps_status vps_synth(const char* scenario_path, const char* out_gt_dir, const char* out_pred_dir) {
  return guarded([&] {
    require_arg(scenario_path, "scenario_path");
    require_arg(out_gt_dir, "out_gt_dir");
    require_arg(out_pred_dir, "out_pred_dir");
    std::ifstream in(scenario_path, std::ios::binary);
    if (!in) throw_io("cannot open scenario '", scenario_path, "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    GeneratedScene scene = generate(parse_scenario_json(text));
    save_dataset({scene.gt}, scene.cats, out_gt_dir, "synth_gt");
    save_dataset({scene.pred}, scene.cats, out_pred_dir, "synth_pred");
  });
}

vps_status vps_render_ranking_table(const char* const* report_jsons, size_t report_count,
                                    char** out_table) {
  return guarded([&] {
    require_arg(report_jsons, "report_jsons");
    require_arg(out_table, "out_table");
    std::vector<std::string> docs;
    docs.reserve(report_count);
    for (size_t i = 0; i < report_count; ++i) {
      require_arg(report_jsons[i], "report_jsons[i]");
      docs.emplace_back(report_jsons[i]);
    }
    std::string table = render_ranking_table(docs);
    char* buffer = new char[table.size() + 1];
    std::memcpy(buffer, table.c_str(), table.size() + 1);
    *out_table = buffer;
  });
}

}  // extern "C"
