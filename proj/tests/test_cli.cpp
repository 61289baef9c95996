// Copyright 2026 The tcpalign Authors.
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tcpalign/cli.hpp"
#include "tcpalign/error.hpp"

using namespace tcpalign;
namespace fs = std::filesystem;

namespace {

const std::string kManifest = (fs::path(TCPALIGN_DATA_DIR) / "minimal" / "manifest.json").string();

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "tcpalign");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tcpalign_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("validate") {
  const Result r = run({"validate", "--manifest", kManifest});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "ok: 2 trajectories, 7 frames, 1 cameras\n");
}

TEST_CASE("validate reports a broken manifest with exit 1") {
  const fs::path dir = fresh("broken");
  fs::create_directories(dir);
  std::ofstream(dir / "manifest.json") << "{\"cameras\": {}, \"trajectories\": [";
  const Result r = run({"validate", "--manifest", (dir / "manifest.json").string()});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("error:") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"validate"}).code == cli::kExitUsage);
  CHECK(run({"simulate", "motion", "--workers", "-3"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("project and unproject") {
  Result r = run({"project", "--point", "0,0,1", "--fx", "512", "--fy", "512", "--cx", "256",
                  "--cy", "256"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "256,256\n");

  // Minimal dataset camera looks straight down from 0.8 m.
  r = run({"project", "--manifest", kManifest, "--camera", "front", "--point", "0.5,0,0"});
  CHECK(r.out == "64,64\n");
  r = run({"project", "--manifest", kManifest, "--camera", "front", "--pixel", "64,64",
           "--plane-z", "0"});
  CHECK(r.out == "0.5,0,0\n");

  r = run({"project", "--point", "0,0,-1", "--fx", "512", "--fy", "512", "--cx", "256", "--cy",
           "256"});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("NonPositiveDepth") != std::string::npos);
}

TEST_CASE("preprocess writes a deterministic tree") {
  const fs::path a = fresh("pre_a"), b = fresh("pre_b");
  Result r = run({"preprocess", "--manifest", kManifest, "--out", a.string(), "--kappa", "64",
                  "--output-size", "32", "--workers", "1", "--pixel-jitter", "2"});
  CHECK(r.code == cli::kExitOk);
  r = run({"preprocess", "--manifest", kManifest, "--out", b.string(), "--kappa", "64",
           "--output-size", "32", "--workers", "4", "--pixel-jitter", "2"});
  CHECK(r.code == cli::kExitOk);
  const auto ta = tree(a);
  CHECK(ta.count("report.json") == 1);
  CHECK(ta.count("aligned/proprio_1.csv") == 1);
  CHECK(ta.count("aligned/images/1/2.png") == 1);
  CHECK(ta == tree(b));
  const Json report = Json::parse(ta.at("report.json"));
  CHECK(report["frames_written"] == 7);
  CHECK(report["config"]["alignment"]["kappa"] == 64);
  CHECK(report["config"]["preprocess"]["pixel_jitter"] == 2.0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("simulate output does not depend on run or worker count") {
  const fs::path a = fresh("sim_a"), b = fresh("sim_b");
  const std::vector<std::string> base = {"simulate", "motion", "--n-demos", "10", "--n-eval", "3",
                                         "--seed", "4"};
  auto with = [&](const fs::path& out, const char* workers) {
    auto v = base;
    v.insert(v.end(), {"--out", out.string(), "--workers", workers});
    return run(v);
  };
  CHECK(with(a, "1").code == cli::kExitOk);
  CHECK(with(b, "3").code == cli::kExitOk);
  const auto ta = tree(a);
  CHECK(ta.count("report.json") == 1);
  CHECK(ta.count("motion.csv") == 1);
  CHECK(ta == tree(b));
  CHECK(Json::parse(ta.at("report.json"))["seed"] == 4);

  const Result stdout_run = run(base);
  CHECK(stdout_run.code == cli::kExitOk);
  CHECK(Json::parse(stdout_run.out) == Json::parse(ta.at("report.json")));
  CHECK(run({"simulate", "nope"}).code != cli::kExitOk);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("config files merge under flags and reject unknown keys") {
  const fs::path dir = fresh("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "good.json") << R"({"alignment": {"kappa": 96}, "harness": {"n_eval": 3},
    "preprocess": {"pixel_jitter": 1.5}, "workers": 2})";
  std::ofstream(dir / "bad.json") << R"({"alignment": {"kappa": 96}, "colour": "red"})";

  cli::CliConfig cfg;
  cli::merge_config(Json::parse(slurp(dir / "good.json")), cfg);
  CHECK(cfg.harness.align.kappa == 96);
  CHECK(cfg.harness.n_eval == 3);
  CHECK(cfg.preprocess_pixel_jitter == 1.5);
  CHECK(cfg.workers == 2);
  CHECK_THROWS_AS(cli::merge_config(Json::parse(slurp(dir / "bad.json")), cfg), Error);

  const Result bad = run({"validate", "--manifest", kManifest, "--config",
                          (dir / "bad.json").string()});
  CHECK(bad.code == cli::kExitFailure);
  CHECK(bad.err.find("colour") != std::string::npos);

  // Flags override the file.
  const fs::path out = fresh("cfg_out");
  const Result r = run({"preprocess", "--manifest", kManifest, "--config",
                        (dir / "good.json").string(), "--kappa", "48", "--out", out.string()});
  CHECK(r.code == cli::kExitOk);
  const Json report = Json::parse(slurp(out / "report.json"));
  CHECK(report["config"]["alignment"]["kappa"] == 48);
  CHECK(report["config"]["preprocess"]["pixel_jitter"] == 1.5);
  fs::remove_all(out);
  fs::remove_all(dir);
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = TCPALIGN_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status(bin + " validate --manifest " + kManifest) == 0);
  CHECK(status(bin + " validate") == 2);
  CHECK(status(bin + " project --point 0,0,-1 --fx 1 --fy 1 --cx 1 --cy 1") == 1);
}
