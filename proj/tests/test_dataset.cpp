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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tcpalign/dataset.hpp"
#include "tcpalign/error.hpp"

using namespace tcpalign;
namespace fs = std::filesystem;

namespace {

const fs::path kMinimal = fs::path(TCPALIGN_DATA_DIR) / "minimal";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

// Fresh copy of the minimal dataset.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tcpalign_ds_" + name);
  fs::remove_all(dir);
  fs::copy(kMinimal, dir, fs::copy_options::recursive);
  return dir;
}

void replace(const fs::path& p, const std::string& from, const std::string& to) {
  std::string s = slurp(p);
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  s.replace(at, from.size(), to);
  spit(p, s);
}

ErrorCode load_error(const fs::path& manifest, std::string* what = nullptr) {
  try {
    load_manifest(manifest);
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  FAIL("manifest loaded without error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("minimal manifest loads") {
  const DatasetManifest ds = load_manifest(kMinimal / "manifest.json");
  CHECK(ds.robot == "synthetic-parallel-jaw");
  CHECK(ds.cameras.size() == 1);
  REQUIRE(ds.trajectories.size() == 2);
  CHECK(ds.trajectories[0].frames.size() == 4);
  CHECK(ds.trajectories[1].frames.size() == 3);
  CHECK(ds.frame_count() == 7);
  const CameraCalib& c = ds.cameras.at("front");
  CHECK(c.width == 128);
  CHECK(c.intrinsics.fx == 100.0);
  CHECK(c.pose.rotation(0, 1) == doctest::Approx(-1.0).epsilon(1e-15));
  const FrameRecord& f = ds.trajectories[0].frames[0];
  CHECK(f.ee_pose.translation.x() == 0.48);
  CHECK(f.action[9] == 1.0);
  CHECK_FALSE(f.jitter.has_value());
  CHECK_NOTHROW(validate_manifest(ds));
}

TEST_CASE("malformed JSON lines report file and line") {
  const fs::path dir = scratch("badjson");
  std::string s = slurp(dir / "traj_1.jsonl");
  const auto nl = s.find('\n');
  s.insert(nl + 1, "{\"index\": 5, oops\n");
  spit(dir / "traj_1.jsonl", s);
  std::string what;
  CHECK(load_error(dir / "manifest.json", &what) == ErrorCode::kParseError);
  CHECK(what.find("traj_1.jsonl:2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("missing field names the field") {
  const fs::path dir = scratch("nofield");
  replace(dir / "traj_0.jsonl", "\"gripper_width\": 0.08, ", "");
  std::string what;
  CHECK(load_error(dir / "manifest.json", &what) == ErrorCode::kParseError);
  CHECK(what.find("gripper_width") != std::string::npos);
  CHECK(what.find("traj_0.jsonl:1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("unknown camera reference") {
  const fs::path dir = scratch("nocam");
  replace(dir / "manifest.json", "\"camera\": \"front\"", "\"camera\": \"wrist\"");
  CHECK(load_error(dir / "manifest.json") == ErrorCode::kMissingCamera);
  fs::remove_all(dir);
}

TEST_CASE("invalid calibration") {
  const fs::path dir = scratch("badcal");
  replace(dir / "manifest.json", "\"fx\": 100.0", "\"fx\": -100.0");
  CHECK(load_error(dir / "manifest.json") == ErrorCode::kInvalidCalibration);
  fs::remove_all(dir);

  const fs::path dir2 = scratch("badcalrot");
  replace(dir2 / "manifest.json", "\"rotation\": [\n        0,\n        -1",
          "\"rotation\": [\n        0,\n        -2");
  CHECK(load_error(dir2 / "manifest.json") == ErrorCode::kInvalidCalibration);
  fs::remove_all(dir2);
}

TEST_CASE("frame indices must increase") {
  const fs::path dir = scratch("order");
  replace(dir / "traj_0.jsonl", "{\"index\": 1,", "{\"index\": 0,");
  CHECK(load_error(dir / "manifest.json") == ErrorCode::kParseError);
  fs::remove_all(dir);
}

TEST_CASE("end-effector rotations are checked") {
  const fs::path dir = scratch("eerot");
  replace(dir / "traj_0.jsonl", "[1, 0, 0, 0, -1, 0, 0, 0, -1]", "[1, 0, 0, 0, 1, 0, 0, 0, -1]");
  std::string what;
  CHECK(load_error(dir / "manifest.json", &what) == ErrorCode::kParseError);
  CHECK(what.find("rotation") != std::string::npos);
  fs::remove_all(dir);

  // Tiny deviations are snapped.
  const fs::path ok = scratch("eerotsnap");
  replace(ok / "traj_0.jsonl", "[1, 0, 0, 0, -1, 0, 0, 0, -1]",
          "[1, 0, 0, 0, -1, 0, 0, 0, -0.9999997]");
  const DatasetManifest ds = load_manifest(ok / "manifest.json");
  CHECK(is_rotation(ds.trajectories[0].frames[0].ee_pose.rotation.matrix(), 1e-12));
  fs::remove_all(ok);
}

TEST_CASE("preprocess writes aligned images and proprio tables") {
  const DatasetManifest ds = load_manifest(kMinimal / "manifest.json");
  AlignmentConfig cfg;
  cfg.kappa = 64;
  cfg.output_size = 32;
  const fs::path out = fs::temp_directory_path() / "tcpalign_pre_a";
  fs::remove_all(out);
  const PreprocessReport r = preprocess_dataset(ds, cfg, out, 1);
  CHECK(r.frames_total == 7);
  CHECK(r.frames_written == 7);
  CHECK(r.errors.empty());
  const ImageBuf img = read_png(out / "aligned/images/0/0.png");
  CHECK(img.width() == 32);
  CHECK(img.height() == 32);

  const std::string csv = slurp(out / "aligned/proprio_0.csv");
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == proprio_csv_header());
  CHECK(header.rfind("frame,r1,r2,r3,r4,r5,r6,z,g,a1", 0) == 0);
  // Camera and tool are both flipped about x; R_C^T R_H has columns (0,-1,0), (1,0,0).
  CHECK(first == "0,0,-1,0,1,0,0,0.3,1,0.02,-0.02,-0.06,1,0,0,0,1,0,1");

  const fs::path out4 = fs::temp_directory_path() / "tcpalign_pre_b";
  fs::remove_all(out4);
  preprocess_dataset(ds, cfg, out4, 4);
  CHECK(tree(out) == tree(out4));
  fs::remove_all(out);
  fs::remove_all(out4);
}

TEST_CASE("preprocess records per-frame failures and continues") {
  const fs::path dir = scratch("missingpng");
  fs::remove(dir / "images/1/001.png");
  const DatasetManifest ds = load_manifest(dir / "manifest.json");
  const fs::path out = fs::temp_directory_path() / "tcpalign_pre_c";
  fs::remove_all(out);
  const PreprocessReport r = preprocess_dataset(ds, AlignmentConfig{}, out, 2);
  CHECK(r.frames_written == 6);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].trajectory == "1");
  CHECK(r.errors[0].frame == 1);
  fs::remove_all(out);
  fs::remove_all(dir);
}

TEST_CASE("calibration jitter is attached per frame and reproducible") {
  const DatasetManifest ds = load_manifest(kMinimal / "manifest.json");
  FrameRng a = derive_rng(1, "dataset", 0, "calibration-jitter");
  FrameRng b = derive_rng(1, "dataset", 0, "calibration-jitter");
  const DatasetManifest ja = jitter_calibration(ds, 5.0, 0.005, a);
  const DatasetManifest jb = jitter_calibration(ds, 5.0, 0.005, b);
  for (std::size_t t = 0; t < ds.trajectories.size(); ++t) {
    for (std::size_t f = 0; f < ds.trajectories[t].frames.size(); ++f) {
      const auto& x = ja.trajectories[t].frames[f].jitter;
      REQUIRE(x.has_value());
      CHECK(x->du == jb.trajectories[t].frames[f].jitter->du);
      CHECK(std::abs(x->du) <= 5.0);
    }
  }
  FrameRng c = derive_rng(1, "dataset", 0, "calibration-jitter");
  CHECK_THROWS_AS(jitter_calibration(ds, -1.0, 0.0, c), Error);
}

TEST_CASE("scalar formatting") {
  CHECK(format_scalar(0.0) == "0");
  CHECK(format_scalar(-0.0) == "0");
  CHECK(format_scalar(1.0) == "1");
  CHECK(format_scalar(0.3) == "0.3");
  CHECK(format_scalar(-0.06) == "-0.06");
  CHECK(format_scalar(1.0 / 3.0) == "0.333333333");
  CHECK(format_scalar(1e-12) == "1e-12");
}
