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
// Versioned JSON report rendering. Reports carry the tool version and a
// config echo so runs stay auditable; metric values are raw [0, 1] doubles
// (human-facing renderings show percentages with four decimals).

#ifndef VIPSEVAL_REPORTS_HPP
#define VIPSEVAL_REPORTS_HPP

#include <span>
#include <string>
#include <vector>

#include "vipseval/core.hpp"

namespace vipseval {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "vipseval";
inline constexpr const char* kToolVersion = "0.1.0";

struct EvalRunInfo {
  std::string name;       // row label in ranking tables
  std::string gt_source;  // manifest path or description
  std::string pred_source;
  int threads = 1;
  int resize_short_side = 0;  // 0 = evaluate at stored resolution
};

std::string vpq_report_to_json(const VpqReport& report, std::span<const int> windows,
                               bool void_pred_counts_as_fp, const EvalRunInfo& info);
std::string stq_report_to_json(const StqReport& report, const EvalRunInfo& info);
std::string validation_to_json(const std::string& video_id, const ValidationResult& result);

// Short human summaries (percentages, four decimals).
std::string vpq_report_summary(const VpqReport& report);
std::string stq_report_summary(const StqReport& report);

// Renders a ranking table (rows sorted by overall VPQ descending) from
// vpq/stq report JSON documents; documents join by their "name" field.
std::string render_ranking_table(std::span<const std::string> report_jsons);

}  // namespace vipseval

#endif  // VIPSEVAL_REPORTS_HPP
