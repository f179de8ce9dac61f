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

// vipseval command line front end. All metric and dataset work goes through
// the shared library's C interface; this binary only parses arguments,
// formats summaries, and maps statuses to exit codes (0 ok, 1 data/io
// error, 2 usage error).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vipseval.h"

namespace {

using nlohmann::json;

int exit_code_for(vps_status status) {
  switch (status) {
    case VPS_OK: return 0;
    case VPS_ERROR_USAGE: return 2;
    default: return 1;
  }
}

int fail(vps_status status) {
  std::cerr << "error: " << vps_last_error() << "\n";
  return exit_code_for(status);
}

struct ReportDeleter {
  void operator()(vps_report* r) const { vps_report_free(r); }
};
using ReportPtr = std::unique_ptr<vps_report, ReportDeleter>;

std::string percent4(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", fraction * 100.0);
  return buf;
}

std::string fraction4(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", fraction);
  return buf;
}

int save_report_if_requested(const vps_report* report, const std::string& out_path) {
  if (out_path.empty()) return 0;
  if (vps_status status = vps_report_save(report, out_path.c_str()); status != VPS_OK)
    return fail(status);
  std::cout << "report written to " << out_path << "\n";
  return 0;
}

void print_vpq_summary(const vps_report* report) {
  json j = json::parse(vps_report_json(report));
  const json& metrics = j.at("metrics");
  std::cout << "VPQ " << percent4(metrics.at("overall_vpq").get<double>());
  for (const json& window : metrics.at("windows"))
    std::cout << "  VPQ" << window.at("k").get<int>() << " "
              << percent4(window.at("vpq").get<double>());
  std::cout << "\n";
}

void print_stq_summary(const vps_report* report) {
  json j = json::parse(vps_report_json(report));
  const json& metrics = j.at("metrics");
  auto opt = [&](const char* key) {
    const json& v = metrics.at(key);
    return v.is_null() ? std::string("n/a") : fraction4(v.get<double>());
  };
  std::cout << "STQ " << opt("stq") << "  AQ " << opt("aq") << "  SQ "
            << fraction4(metrics.at("sq").get<double>()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"video panoptic segmentation evaluation toolkit"};
  app.set_version_flag("--version", std::string("vipseval ") + vps_version());
  app.require_subcommand(1);

  // eval-vpq
  std::string vpq_gt, vpq_pred, vpq_out, vpq_name;
  std::vector<int> vpq_windows{1, 2, 4, 6};
  int vpq_threads = 0, vpq_resize = 0;
  bool vpq_void_fp = false;
  auto* eval_vpq = app.add_subcommand("eval-vpq", "tube-based video panoptic quality");
  eval_vpq->add_option("--gt", vpq_gt, "ground-truth manifest")->required();
  eval_vpq->add_option("--pred", vpq_pred, "prediction manifest")->required();
  eval_vpq->add_option("--windows", vpq_windows, "window sizes")->delimiter(',');
  eval_vpq->add_option("--out", vpq_out, "report JSON path");
  eval_vpq->add_option("--name", vpq_name, "row label for ranking tables");
  eval_vpq->add_option("--threads", vpq_threads, "worker count (0 = auto)");
  eval_vpq->add_option("--resize-short-side", vpq_resize,
                       "evaluate at this short side (0 = stored resolution)");
  eval_vpq->add_flag("--void-pred-fp", vpq_void_fp,
                     "count mostly-void prediction tubes as false positives");

  // eval-stq
  std::string stq_gt, stq_pred, stq_out, stq_name;
  int stq_threads = 0, stq_resize = 0;
  auto* eval_stq = app.add_subcommand("eval-stq", "segmentation and tracking quality");
  eval_stq->add_option("--gt", stq_gt, "ground-truth manifest")->required();
  eval_stq->add_option("--pred", stq_pred, "prediction manifest")->required();
  eval_stq->add_option("--out", stq_out, "report JSON path");
  eval_stq->add_option("--name", stq_name, "row label for ranking tables");
  eval_stq->add_option("--threads", stq_threads, "worker count (0 = auto)");
  eval_stq->add_option("--resize-short-side", stq_resize,
                       "evaluate at this short side (0 = stored resolution)");

  // convert
  std::string conv_in, conv_mode, conv_out;
  auto* convert = app.add_subcommand("convert", "panoptic annotations to semantic or instance");
  convert->add_option("--in", conv_in, "panoptic manifest")->required();
  convert->add_option("--mode", conv_mode, "semantic | instance")->required();
  convert->add_option("--out", conv_out, "output dataset directory")->required();

  // fuse
  std::vector<std::string> fuse_logits;
  std::vector<double> fuse_weights;
  std::string fuse_instances, fuse_video, fuse_out;
  long fuse_min_area = 0;
  double fuse_overlap_keep = 0.5;
  auto* fuse = app.add_subcommand("fuse", "ensemble stuff logits and merge with instances");
  fuse->add_option("--logits", fuse_logits, "logit volumes, one per source")->required();
  fuse->add_option("--weights", fuse_weights, "per-source weights (default uniform)")
      ->delimiter(',');
  fuse->add_option("--instances", fuse_instances, "instance manifest")->required();
  fuse->add_option("--video-id", fuse_video, "video to fuse when the manifest has several");
  fuse->add_option("--min-area", fuse_min_area, "drop segments below this per-frame area");
  fuse->add_option("--overlap-keep", fuse_overlap_keep,
                   "minimum kept fraction for an instance to survive");
  fuse->add_option("--out", fuse_out, "output dataset directory")->required();

  // decode
  std::string dec_queries, dec_features, dec_cats, dec_video, dec_out;
  double dec_tau = 0.0;
  bool dec_normalize = false;
  auto* decode = app.add_subcommand("decode", "query/feature inner-product mask decoding");
  decode->add_option("--queries", dec_queries, "query bundle (.wgt)")->required();
  decode->add_option("--features", dec_features, "feature volume (.lgt)")->required();
  decode->add_option("--categories", dec_cats, "category table JSON")->required();
  decode->add_option("--tau", dec_tau, "assignment threshold");
  decode->add_flag("--normalize", dec_normalize, "L2-normalize queries and features");
  decode->add_option("--video-id", dec_video, "output video id");
  decode->add_option("--out", dec_out, "output dataset directory")->required();

  // ema
  std::vector<std::string> ema_snapshots;
  double ema_decay = 0.999;
  std::string ema_out;
  auto* ema = app.add_subcommand("ema", "exponential moving average of weight snapshots");
  ema->add_option("--snapshots", ema_snapshots, "snapshot files in stream order")->required();
  ema->add_option("--decay", ema_decay, "decay factor in [0, 1]");
  ema->add_option("--out", ema_out, "averaged weights output path")->required();

  // synth
  std::string synth_spec, synth_gt_dir, synth_pred_dir;
  auto* synth = app.add_subcommand("synth", "render a synthetic scenario to two datasets");
  synth->add_option("--spec", synth_spec, "scenario JSON")->required();
  synth->add_option("--out-gt", synth_gt_dir, "ground-truth output directory")->required();
  synth->add_option("--out-pred", synth_pred_dir, "prediction output directory")->required();

  // resize
  std::string rs_in, rs_out;
  int rs_target = 720;
  auto* resize = app.add_subcommand("resize", "short-side resize of a dataset");
  resize->add_option("--in", rs_in, "input manifest")->required();
  resize->add_option("--target", rs_target, "target short side in pixels");
  resize->add_option("--out", rs_out, "output dataset directory")->required();

  // validate
  std::string val_in, val_out;
  auto* validate = app.add_subcommand("validate", "check dataset invariants");
  validate->add_option("--in", val_in, "input manifest")->required();
  validate->add_option("--out", val_out, "validation report JSON path");

  // report
  std::vector<std::string> report_files;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "ranking table from report JSON files");
  report_cmd->add_option("reports", report_files, "report JSON files")->required();
  report_cmd->add_option("--out", report_out, "write the table here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*eval_vpq) {
    vps_report* raw = nullptr;
    vps_status status =
        vps_eval_vpq(vpq_gt.c_str(), vpq_pred.c_str(), vpq_windows.data(), vpq_windows.size(),
                     vpq_threads, vpq_resize, vpq_void_fp ? 1 : 0, vpq_name.c_str(), &raw);
    if (status != VPS_OK) return fail(status);
    ReportPtr report(raw);
    print_vpq_summary(report.get());
    return save_report_if_requested(report.get(), vpq_out);
  }

  if (*eval_stq) {
    vps_report* raw = nullptr;
    vps_status status = vps_eval_stq(stq_gt.c_str(), stq_pred.c_str(), stq_threads, stq_resize,
                                     stq_name.c_str(), &raw);
    if (status != VPS_OK) return fail(status);
    ReportPtr report(raw);
    print_stq_summary(report.get());
    return save_report_if_requested(report.get(), stq_out);
  }

  if (*convert) {
    vps_status status = vps_convert_dataset(conv_in.c_str(), conv_mode.c_str(), conv_out.c_str());
    if (status != VPS_OK) return fail(status);
    std::cout << "converted dataset written to " << conv_out << "/manifest.json\n";
    return 0;
  }

  if (*fuse) {
    std::vector<const char*> logit_ptrs;
    for (const std::string& p : fuse_logits) logit_ptrs.push_back(p.c_str());
    if (!fuse_weights.empty() && fuse_weights.size() != fuse_logits.size()) {
      std::cerr << "error: got " << fuse_weights.size() << " weights for " << fuse_logits.size()
                << " logit sources\n";
      return 2;
    }
    vps_status status =
        vps_fuse(logit_ptrs.data(), logit_ptrs.size(),
                 fuse_weights.empty() ? nullptr : fuse_weights.data(), fuse_instances.c_str(),
                 fuse_video.empty() ? nullptr : fuse_video.c_str(), fuse_min_area,
                 fuse_overlap_keep, fuse_out.c_str());
    if (status != VPS_OK) return fail(status);
    std::cout << "fused dataset written to " << fuse_out << "/manifest.json\n";
    return 0;
  }

  if (*decode) {
    vps_status status =
        vps_decode(dec_queries.c_str(), dec_features.c_str(), dec_cats.c_str(), dec_tau,
                   dec_normalize ? 1 : 0, dec_video.empty() ? nullptr : dec_video.c_str(),
                   dec_out.c_str());
    if (status != VPS_OK) return fail(status);
    std::cout << "decoded dataset written to " << dec_out << "/manifest.json\n";
    return 0;
  }

  if (*ema) {
    std::vector<const char*> snapshot_ptrs;
    for (const std::string& p : ema_snapshots) snapshot_ptrs.push_back(p.c_str());
    vps_status status =
        vps_ema(snapshot_ptrs.data(), snapshot_ptrs.size(), ema_decay, ema_out.c_str());
    if (status != VPS_OK) return fail(status);
    std::cout << "averaged weights written to " << ema_out << "\n";
    return 0;
  }

  if (*synth) {
    vps_status status =
        vps_synth(synth_spec.c_str(), synth_gt_dir.c_str(), synth_pred_dir.c_str());
    if (status != VPS_OK) return fail(status);
    std::cout << "ground truth written to " << synth_gt_dir << "/manifest.json\n"
              << "prediction written to " << synth_pred_dir << "/manifest.json\n";
    return 0;
  }

  if (*resize) {
    vps_status status = vps_resize_dataset(rs_in.c_str(), rs_target, rs_out.c_str());
    if (status != VPS_OK) return fail(status);
    std::cout << "resized dataset written to " << rs_out << "/manifest.json\n";
    return 0;
  }

  if (*validate) {
    vps_report* raw = nullptr;
    vps_status status = vps_validate_dataset(val_in.c_str(), &raw);
    if (status != VPS_OK) return fail(status);
    ReportPtr report(raw);
    int ok = 0;
    if (vps_status s = vps_report_bool(report.get(), "/ok", &ok); s != VPS_OK) return fail(s);
    if (int rc = save_report_if_requested(report.get(), val_out); rc != 0) return rc;
    if (ok) {
      std::cout << "dataset is valid\n";
      return 0;
    }
    std::cout << vps_report_json(report.get());
    std::cerr << "error: dataset has invariant violations\n";
    return 1;
  }

  if (*report_cmd) {
    std::vector<std::string> docs;
    for (const std::string& path : report_files) {
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot open report '" << path << "'\n";
        return 1;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      docs.push_back(buffer.str());
    }
    std::vector<const char*> doc_ptrs;
    for (const std::string& d : docs) doc_ptrs.push_back(d.c_str());
    char* table = nullptr;
    vps_status status = vps_render_ranking_table(doc_ptrs.data(), doc_ptrs.size(), &table);
    if (status != VPS_OK) return fail(status);
    std::cout << table;
    if (!report_out.empty()) {
      std::ofstream out(report_out, std::ios::binary);
      out << table;
      if (!out) {
        vps_string_free(table);
        std::cerr << "error: failed writing '" << report_out << "'\n";
        return 1;
      }
    }
    vps_string_free(table);
    return 0;
  }

  return 2;
}
