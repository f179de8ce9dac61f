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

#include "vipseval/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vipseval/error.hpp"
#include "vipseval/metrics_vpq.hpp"

namespace vipseval {

namespace {

using nlohmann::json;

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

json tool_block() {
  return {{"name", kToolName}, {"version", kToolVersion}};
}

json run_block(const EvalRunInfo& info) {
  return {{"gt", info.gt_source},
          {"pred", info.pred_source},
          {"threads", info.threads},
          {"resize_short_side", info.resize_short_side}};
}

}  // namespace

std::string vpq_report_to_json(const VpqReport& report, std::span<const int> windows,
                               bool void_pred_counts_as_fp, const EvalRunInfo& info) {
  json window_list = json::array();
  for (const VpqWindowResult& window : report.windows) {
    json per_class = json::array();
    for (const auto& [category_id, stats] : window.per_class) {
      json entry = {{"category_id", category_id}, {"iou_sum", stats.iou_sum},
                    {"tp", stats.tp},             {"fp", stats.fp},
                    {"fn", stats.fn}};
      if (auto quality = stats.quality()) {
        entry["vpq"] = *quality;
      } else {
        entry["vpq"] = nullptr;
      }
      per_class.push_back(std::move(entry));
    }
    window_list.push_back({{"k", window.window},
                           {"vpq", window.vpq},
                           {"classes_evaluated", window.classes_evaluated},
                           {"per_class", per_class}});
  }

  json config = run_block(info);
  config["windows"] = std::vector<int>(windows.begin(), windows.end());
  config["void_pred_counts_as_fp"] = void_pred_counts_as_fp;

  json j = {{"schema_version", kReportSchemaVersion},
            {"tool", tool_block()},
            {"kind", "vpq_report"},
            {"name", info.name},
            {"config", config},
            {"metrics", {{"overall_vpq", report.overall_vpq}, {"windows", window_list}}}};
  return j.dump(2) + "\n";
}

std::string stq_report_to_json(const StqReport& report, const EvalRunInfo& info) {
  json per_class = json::array();
  for (const ClassIou& entry : report.per_class_iou)
    per_class.push_back({{"category_id", entry.category_id}, {"iou", entry.iou}});
  json per_track = json::array();
  for (const TrackAq& track : report.per_track_aq)
    per_track.push_back(
        {{"video_id", track.video_id}, {"track_id", track.track_id}, {"aq", track.aq}});

  json config = run_block(info);
  config["rules"] = {{"aq_tracks", "thing_only"},
                     {"aq_matching", "class_agnostic"},
                     {"sq_classes", "present_in_gt_or_pred"},
                     {"gt_void_pixels", "excluded"}};

  json metrics = {{"sq", report.sq},
                  {"per_class_iou", per_class},
                  {"per_track_aq", per_track}};
  metrics["aq"] = report.aq ? json(*report.aq) : json(nullptr);
  metrics["stq"] = report.stq ? json(*report.stq) : json(nullptr);

  json j = {{"schema_version", kReportSchemaVersion},
            {"tool", tool_block()},
            {"kind", "stq_report"},
            {"name", info.name},
            {"config", config},
            {"metrics", metrics}};
  return j.dump(2) + "\n";
}

std::string validation_to_json(const std::string& video_id, const ValidationResult& result) {
  json violations = json::array();
  for (const Violation& v : result.violations) {
    violations.push_back({{"code", v.code},
                          {"message", v.message},
                          {"frame", v.frame},
                          {"y", v.y},
                          {"x", v.x}});
  }
  json j = {{"schema_version", kReportSchemaVersion},
            {"tool", tool_block()},
            {"kind", "validation_report"},
            {"video_id", video_id},
            {"ok", result.ok()},
            {"violations", violations}};
  return j.dump(2) + "\n";
}

std::string vpq_report_summary(const VpqReport& report) {
  std::ostringstream os;
  os << "VPQ " << percent4(report.overall_vpq);
  for (const VpqWindowResult& window : report.windows)
    os << "  VPQ" << window.window << " " << percent4(window.vpq);
  return os.str();
}

std::string stq_report_summary(const StqReport& report) {
  std::ostringstream os;
  os << "STQ " << (report.stq ? fraction4(*report.stq) : "n/a");
  os << "  AQ " << (report.aq ? fraction4(*report.aq) : "n/a");
  os << "  SQ " << fraction4(report.sq);
  return os.str();
}

std::string render_ranking_table(std::span<const std::string> report_jsons) {
  struct Row {
    std::optional<double> overall;
    std::map<int, double> windows;
    std::optional<double> stq;
  };
  std::map<std::string, Row> rows;
  std::set<int> window_keys;

  for (const std::string& text : report_jsons) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw_data("malformed report JSON");
    const std::string kind = j.value("kind", "");
    const std::string name = j.value("name", "unnamed");
    Row& row = rows[name];
    if (kind == "vpq_report") {
      const json& metrics = j.at("metrics");
      std::vector<double> scores;
      for (const json& window : metrics.at("windows")) {
        const int k = window.at("k").get<int>();
        row.windows[k] = window.at("vpq").get<double>();
        scores.push_back(window.at("vpq").get<double>());
        window_keys.insert(k);
      }
      if (metrics.contains("overall_vpq")) {
        row.overall = metrics.at("overall_vpq").get<double>();
      } else if (!scores.empty()) {
        // Reports written by other tools may omit the precomputed mean.
        row.overall = aggregate_vpq(scores);
      }
    } else if (kind == "stq_report") {
      const json& stq_value = j.at("metrics").at("stq");
      if (!stq_value.is_null()) row.stq = stq_value.get<double>();
    } else {
      throw_data("unsupported report kind '", kind, "'");
    }
  }
  if (rows.empty()) throw_usage("no reports to rank");

  std::vector<std::pair<std::string, const Row*>> order;
  for (const auto& [name, row] : rows) order.emplace_back(name, &row);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    const double va = a.second->overall.value_or(-1.0);
    const double vb = b.second->overall.value_or(-1.0);
    return va > vb;
  });

  std::size_t name_width = 4;
  for (const auto& [name, row] : order) name_width = std::max(name_width, name.size());

  std::ostringstream os;
  auto pad = [&os](const std::string& cell, std::size_t width) {
    os << cell << std::string(width > cell.size() ? width - cell.size() : 0, ' ');
  };
  os << "Rank  ";
  pad("Name", name_width);
  pad("  VPQ", 11);
  for (int k : window_keys) pad("  VPQ" + std::to_string(k), 11);
  pad("  STQ", 10);
  os << "\n";

  int rank = 1;
  for (const auto& [name, row] : order) {
    char rank_buf[16];
    std::snprintf(rank_buf, sizeof(rank_buf), "%-6d", rank++);
    os << rank_buf;
    pad(name, name_width);
    pad(row->overall ? "  " + percent4(*row->overall) : "  -", 11);
    for (int k : window_keys) {
      auto it = row->windows.find(k);
      pad(it != row->windows.end() ? "  " + percent4(it->second) : "  -", 11);
    }
    pad(row->stq ? "  " + fraction4(*row->stq) : "  -", 10);
    os << "\n";
  }
  return os.str();
}

}  // namespace vipseval
