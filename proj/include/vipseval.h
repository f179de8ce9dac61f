/* Copyright 2026 The Vipseval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the vipseval shared library.
 *
 * Every function returns a vps_status; on failure vps_last_error() holds a
 * message for the calling thread. Out-parameters are written only on
 * VPS_OK. Handles are opaque and freed with their matching *_free call.
 * Operations that write datasets put a manifest.json inside the output
 * directory.
 */

#ifndef VIPSEVAL_H
#define VIPSEVAL_H

#include <stddef.h>

#if defined(_WIN32)
#define VIPSEVAL_API __declspec(dllexport)
#else
#define VIPSEVAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vps_status {
  VPS_OK = 0,
  VPS_ERROR_USAGE = 1,    /* arguments can never be valid */
  VPS_ERROR_DATA = 2,     /* input violates a documented invariant */
  VPS_ERROR_IO = 3,       /* filesystem or decode failure */
  VPS_ERROR_INTERNAL = 4, /* broken internal assumption */
} vps_status;

VIPSEVAL_API const char* vps_version(void);

/* Message for the last failing call on this thread ("" if none). */
VIPSEVAL_API const char* vps_last_error(void);

/* Frees strings returned through char** out-parameters. */
VIPSEVAL_API void vps_string_free(char* text);

/* ---- reports ------------------------------------------------------- */

typedef struct vps_report vps_report;

VIPSEVAL_API void vps_report_free(vps_report* report);

/* JSON text owned by the report handle; valid until vps_report_free. */
VIPSEVAL_API const char* vps_report_json(const vps_report* report);

/* Reads one number by JSON pointer, e.g. "/metrics/overall_vpq". */
VIPSEVAL_API vps_status vps_report_number(const vps_report* report, const char* json_pointer,
                                          double* out_value);

/* True/false fields, e.g. "/ok" on validation reports. */
VIPSEVAL_API vps_status vps_report_bool(const vps_report* report, const char* json_pointer,
                                        int* out_value);

VIPSEVAL_API vps_status vps_report_save(const vps_report* report, const char* path);

/* ---- evaluation ----------------------------------------------------- */

/* threads <= 0 means auto (VIPSEVAL_THREADS env var, then hardware).
 * resize_short_side 0 evaluates at the stored resolution. */
VIPSEVAL_API vps_status vps_eval_vpq(const char* gt_manifest, const char* pred_manifest,
                                     const int* windows, size_t window_count, int threads,
                                     int resize_short_side, int void_pred_counts_as_fp,
                                     const char* run_name, vps_report** out_report);

VIPSEVAL_API vps_status vps_eval_stq(const char* gt_manifest, const char* pred_manifest,
                                     int threads, int resize_short_side, const char* run_name,
                                     vps_report** out_report);

/* Arithmetic mean of per-window scores (any scale). */
VIPSEVAL_API vps_status vps_aggregate_vpq(const double* window_scores, size_t count,
                                          double* out_mean);

/* ---- dataset operations --------------------------------------------- */

/* Validates every video; the report's /ok field is the verdict (invalid
 * content is data, not a failing call). */
VIPSEVAL_API vps_status vps_validate_dataset(const char* manifest, vps_report** out_report);

/* mode: "semantic" or "instance". */
VIPSEVAL_API vps_status vps_convert_dataset(const char* manifest, const char* mode,
                                            const char* out_dir);

VIPSEVAL_API vps_status vps_resize_dataset(const char* manifest, int target_short_side,
                                           const char* out_dir);

/* ---- fusion / decoding / averaging ----------------------------------- */

/* Averages the stuff-class logits of the sources (softmax after the mean),
 * then merges with the instance manifest's masks. weights may be NULL for
 * uniform. video_id may be NULL when the instance manifest holds exactly
 * one video. */
VIPSEVAL_API vps_status vps_fuse(const char* const* logit_paths, size_t logit_count,
                                 const double* weights, const char* instance_manifest,
                                 const char* video_id, long min_area, double overlap_keep,
                                 const char* out_dir);

/* Queries are a .wgt file with tensors "queries" [N,D], "query_kinds" [N]
 * (0 = semantic class, 1 = instance) and "query_categories" [N]; features
 * are a .lgt volume whose class index tags the D feature dimensions. */
VIPSEVAL_API vps_status vps_decode(const char* queries_path, const char* features_path,
                                   const char* categories_path, double tau, int normalize,
                                   const char* video_id, const char* out_dir);

VIPSEVAL_API vps_status vps_ema(const char* const* snapshot_paths, size_t snapshot_count,
                                double decay, const char* out_path);

/* ---- synthetic scenes ------------------------------------------------ */

VIPSEVAL_API vps_status vps_synth(const char* scenario_path, const char* out_gt_dir,
                                  const char* out_pred_dir);

/* ---- ranking tables --------------------------------------------------- */

/* Renders a ranking table from report JSON documents; caller frees
 * *out_table with vps_string_free. */
VIPSEVAL_API vps_status vps_render_ranking_table(const char* const* report_jsons,
                                                 size_t report_count, char** out_table);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VIPSEVAL_H */
