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

// End-to-end runs of the installed binary (path in VIPSEVAL_CLI_BIN).
// Covers the exit-code contract: 0 success, 1 data error, 2 usage error.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "test_util.hpp"
#include "vipseval/dataset_io.hpp"
#include "vipseval/synthgen.hpp"

using namespace vipseval;
using namespace vipseval::testing;

namespace {

std::string cli_path() {
  const char* env = std::getenv("VIPSEVAL_CLI_BIN");
  REQUIRE_MESSAGE(env != nullptr, "VIPSEVAL_CLI_BIN must point at the binary");
  return env;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
  const std::filesystem::path log = scratch / "out.log";
  const std::string command = cli_path() + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(command.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(raw);
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

void write_scenario(const std::filesystem::path& path, std::uint64_t seed,
                    const char* video_id) {
  ScenarioLimits limits;
  limits.require_thing_track = true;
  limits.min_frames = 4;
  ScenarioSpec spec = random_scenario(seed, limits);
  spec.video_id = video_id;
  std::ofstream(path) << scenario_to_json(spec);
}

}  // namespace

TEST_CASE("cli happy paths and exit codes") {
  TempDir dir("cli");
  const auto scratch = dir.path();

  write_scenario(scratch / "scene.json", 11, "clip");
  const std::string gt_dir = (scratch / "gt").string();
  const std::string pred_dir = (scratch / "pred").string();

  SUBCASE("synth then identity eval-vpq reports 100 percent") {
    RunResult synth = run_cli("synth --spec " + (scratch / "scene.json").string() + " --out-gt " +
                                  gt_dir + " --out-pred " + pred_dir,
                              scratch);
    REQUIRE(synth.exit_code == 0);

    RunResult eval = run_cli("eval-vpq --gt " + gt_dir + "/manifest.json --pred " + gt_dir +
                                 "/manifest.json --windows 1,2,4,6 --out " +
                                 (scratch / "r.json").string(),
                             scratch);
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.find("VPQ 100.0000") != std::string::npos);
    CHECK(std::filesystem::exists(scratch / "r.json"));

    RunResult stq = run_cli("eval-stq --gt " + gt_dir + "/manifest.json --pred " + gt_dir +
                                "/manifest.json --out " + (scratch / "s.json").string(),
                            scratch);
    CHECK(stq.exit_code == 0);
    CHECK(stq.output.find("STQ 1.0000") != std::string::npos);

    RunResult table = run_cli("report " + (scratch / "r.json").string() + " " +
                                  (scratch / "s.json").string(),
                              scratch);
    CHECK(table.exit_code == 0);
    CHECK(table.output.find("100.0000") != std::string::npos);

    RunResult validate =
        run_cli("validate --in " + gt_dir + "/manifest.json", scratch);
    CHECK(validate.exit_code == 0);
    CHECK(validate.output.find("valid") != std::string::npos);

    RunResult convert = run_cli("convert --in " + gt_dir + "/manifest.json --mode instance " +
                                    "--out " + (scratch / "inst").string(),
                                scratch);
    CHECK(convert.exit_code == 0);

    RunResult resize = run_cli("resize --in " + gt_dir + "/manifest.json --target 3 --out " +
                                   (scratch / "small").string(),
                               scratch);
    CHECK(resize.exit_code == 0);
  }

  SUBCASE("usage errors exit 2") {
    CHECK(run_cli("frobnicate", scratch).exit_code == 2);
    CHECK(run_cli("eval-vpq --gt only", scratch).exit_code == 2);
    CHECK(run_cli("convert --in x --mode both --out y", scratch).exit_code == 2);
  }

  SUBCASE("mismatched video ids exit 1 and name the id") {
    RunResult synth = run_cli("synth --spec " + (scratch / "scene.json").string() + " --out-gt " +
                                  gt_dir + " --out-pred " + pred_dir,
                              scratch);
    REQUIRE(synth.exit_code == 0);
    write_scenario(scratch / "other.json", 12, "other_clip");
    RunResult synth2 = run_cli("synth --spec " + (scratch / "other.json").string() +
                                   " --out-gt " + (scratch / "gt2").string() + " --out-pred " +
                                   (scratch / "pred2").string(),
                               scratch);
    REQUIRE(synth2.exit_code == 0);

    RunResult eval = run_cli("eval-vpq --gt " + gt_dir + "/manifest.json --pred " +
                                 (scratch / "gt2" / "manifest.json").string(),
                             scratch);
    CHECK(eval.exit_code == 1);
    CHECK(eval.output.find("clip") != std::string::npos);
  }

  SUBCASE("missing files exit 1") {
    RunResult eval = run_cli("eval-vpq --gt missing.json --pred missing.json", scratch);
    CHECK(eval.exit_code == 1);
    CHECK(eval.output.find("error") != std::string::npos);
  }

  SUBCASE("datasets with violations fail validate with exit 1") {
    RunResult synth = run_cli("synth --spec " + (scratch / "scene.json").string() + " --out-gt " +
                                  gt_dir + " --out-pred " + pred_dir,
                              scratch);
    REQUIRE(synth.exit_code == 0);
    // Empty the sidecar: every labeled pixel becomes an unmapped id.
    std::ofstream(std::filesystem::path(gt_dir) / "clip" / "segments.json")
        << R"({"segments": []})";
    RunResult validate = run_cli("validate --in " + gt_dir + "/manifest.json --out " +
                                     (scratch / "violations.json").string(),
                                 scratch);
    CHECK(validate.exit_code == 1);
    CHECK(validate.output.find("unmapped") != std::string::npos);
    CHECK(std::filesystem::exists(scratch / "violations.json"));
  }

  SUBCASE("ema and decode round trip through the documented bundles") {
    // Snapshots via the library writer, consumed by the CLI.
    WeightMap a = WeightMap::create({{"w", Tensor{{2}, {0.f, 4.f}}}});
    WeightMap b = WeightMap::create({{"w", Tensor{{2}, {2.f, 0.f}}}});
    write_weights(a, scratch / "a.wgt");
    write_weights(b, scratch / "b.wgt");
    RunResult ema = run_cli("ema --snapshots " + (scratch / "a.wgt").string() + " " +
                                (scratch / "b.wgt").string() + " --decay 0.5 --out " +
                                (scratch / "avg.wgt").string(),
                            scratch);
    REQUIRE(ema.exit_code == 0);
    WeightMap avg = read_weights(scratch / "avg.wgt");
    CHECK(avg.tensors().at("w").data == std::vector<float>{1.f, 2.f});

    // Query bundle: one instance query and one semantic query over a 2-dim
    // feature space.
    WeightMap queries = WeightMap::create({
        {"queries", Tensor{{2, 2}, {1.f, 0.f, 0.f, 1.f}}},
        {"query_categories", Tensor{{2}, {2.f, 1.f}}},
        {"query_kinds", Tensor{{2}, {1.f, 0.f}}},
    });
    write_weights(queries, scratch / "q.wgt");
    std::vector<float> feature_values;
    for (int px = 0; px < 6; ++px) {
      feature_values.push_back(px < 3 ? 1.f : 0.f);
      feature_values.push_back(px < 3 ? 0.f : 1.f);
    }
    write_logits(LogitVolume::create(1, 2, 3, {1, 2}, feature_values), scratch / "f.lgt");
    std::ofstream(scratch / "cats.json")
        << R"({"categories":[{"id":1,"name":"bg","is_thing":false},)"
        << R"({"id":2,"name":"fg","is_thing":true}]})";
    RunResult decode = run_cli("decode --queries " + (scratch / "q.wgt").string() +
                                   " --features " + (scratch / "f.lgt").string() +
                                   " --categories " + (scratch / "cats.json").string() +
                                   " --tau 0.5 --out " + (scratch / "decoded").string(),
                               scratch);
    REQUIRE(decode.exit_code == 0);
    CHECK(std::filesystem::exists(scratch / "decoded" / "manifest.json"));

    // Fuse the decoded instances with a stuff volume.
    std::vector<float> stuff_values(6, 1.f);
    write_logits(LogitVolume::create(1, 2, 3, {1}, stuff_values), scratch / "s1.lgt");
    write_logits(LogitVolume::create(1, 2, 3, {1}, stuff_values), scratch / "s2.lgt");
    RunResult fuse = run_cli("fuse --logits " + (scratch / "s1.lgt").string() + " " +
                                 (scratch / "s2.lgt").string() + " --instances " +
                                 (scratch / "decoded" / "manifest.json").string() + " --out " +
                                 (scratch / "fused").string(),
                             scratch);
    REQUIRE_MESSAGE(fuse.exit_code == 0, fuse.output);
    CHECK(std::filesystem::exists(scratch / "fused" / "manifest.json"));
  }
}
