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

#include "tcpalign/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "tcpalign/dataset.hpp"
#include "tcpalign/error.hpp"

namespace tcpalign::cli {
namespace {

namespace fs = std::filesystem;

const char* const kExperiments[] = {"invariance", "retrieval", "crop-sweep", "calibration",
                                    "motion"};

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<int> kappa;
  std::optional<int> output_size;
  std::optional<double> pixel_jitter;
  std::optional<double> proprio_noise;
  CLI::Option* overlay = nullptr;
  bool overlay_value = true;

  // simulate
  std::string experiment;
  std::optional<int> n_scenes;
  std::optional<int> n_demos;
  std::optional<int> n_eval;

  // preprocess / validate / project
  std::string manifest;
  std::optional<std::string> camera;
  std::vector<double> point;
  std::vector<double> pixel;
  double plane_z = 0.0;
  std::optional<double> fx, fy, cx, cy;
  std::optional<int> width, height;
  std::vector<double> rotation;
  std::vector<double> translation;
};

void add_global_options(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "base seed (default 0)");
  app.add_option("--workers", f.workers, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", f.out, "output directory");
  app.add_option("--kappa", f.kappa, "crop side in pixels");
  app.add_option("--output-size", f.output_size, "aligned image side in pixels");
  f.overlay = app.add_flag("--overlay,!--no-overlay", f.overlay_value, "draw the TCP axes overlay");
  app.add_option("--pixel-jitter", f.pixel_jitter, "TCP projection jitter in pixels");
  app.add_option("--proprio-noise", f.proprio_noise, "proprio noise standard deviation");
}

void apply_flags(const Flags& f, CliConfig& cfg) {
  auto& a = cfg.harness.align;
  if (f.seed) a.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.out) cfg.out = *f.out;
  if (f.kappa) a.kappa = *f.kappa;
  if (f.output_size) a.output_size = *f.output_size;
  if (f.overlay->count() > 0) a.overlay_enabled = f.overlay_value;
  if (f.pixel_jitter) {
    cfg.harness.pixel_jitter = *f.pixel_jitter;
    cfg.preprocess_pixel_jitter = *f.pixel_jitter;
  }
  if (f.proprio_noise) {
    cfg.harness.proprio_noise = *f.proprio_noise;
    cfg.preprocess_proprio_noise = *f.proprio_noise;
  }
  if (f.n_scenes) cfg.harness.n_scenes = *f.n_scenes;
  if (f.n_demos) cfg.harness.n_demos = *f.n_demos;
  if (f.n_eval) cfg.harness.n_eval = *f.n_eval;
  cfg.harness.workers = cfg.workers;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// --- subcommands ---------------------------------------------------------------

int cmd_validate(const Flags& f, std::ostream& out) {
  const DatasetManifest ds = load_manifest(f.manifest);
  out << "ok: " << ds.trajectories.size() << " trajectories, " << ds.frame_count()
      << " frames, " << ds.cameras.size() << " cameras\n";
  return kExitOk;
}

int cmd_preprocess(const Flags& f, const CliConfig& cfg, std::ostream& err) {
  if (!cfg.out) throw CLI::RequiredError("--out");
  cfg.harness.align.validate();
  const auto t0 = std::chrono::steady_clock::now();
  DatasetManifest ds = load_manifest(f.manifest);
  if (cfg.preprocess_pixel_jitter > 0.0 || cfg.preprocess_proprio_noise > 0.0) {
    FrameRng rng = derive_rng(cfg.harness.align.seed, "dataset", 0, "calibration-jitter");
    ds = jitter_calibration(ds, cfg.preprocess_pixel_jitter, cfg.preprocess_proprio_noise, rng);
  }
  err << "preprocess: " << ds.frame_count() << " frames from " << f.manifest << "\n";
  const PreprocessReport r = preprocess_dataset(ds, cfg.harness.align, *cfg.out, cfg.workers);

  Json report;
  report["seed"] = cfg.harness.align.seed;
  report["config"] = preprocess_config_json(cfg);
  report["frames_total"] = r.frames_total;
  report["frames_written"] = r.frames_written;
  report["clamped_frames"] = r.clamped_frames;
  Json errors = Json::array();
  for (const auto& e : r.errors) {
    errors.push_back({{"trajectory", e.trajectory}, {"frame", e.frame}, {"message", e.message}});
  }
  report["errors"] = std::move(errors);
  write_json_file(*cfg.out / "report.json", report);

  err << "preprocess: wrote " << r.frames_written << "/" << r.frames_total << " frames ("
      << r.clamped_frames << " clamped) in " << ms_since(t0) << " ms [load " << r.timing.load_ms
      << ", align " << r.timing.align_ms << ", write " << r.timing.write_ms << " ms]\n";
  for (const auto& e : r.errors) {
    err << "preprocess: " << e.trajectory << "/" << e.frame << ": " << e.message << "\n";
  }
  return r.errors.empty() ? kExitOk : kExitFailure;
}

CameraCalib camera_from_flags(const Flags& f) {
  if (!f.manifest.empty()) {
    const DatasetManifest ds = load_manifest(f.manifest);
    if (!f.camera) {
      if (ds.cameras.size() != 1) throw CLI::RequiredError("--camera");
      return ds.cameras.begin()->second;
    }
    const auto it = ds.cameras.find(*f.camera);
    if (it == ds.cameras.end()) {
      throw Error(ErrorCode::kMissingCamera, "camera '" + *f.camera + "' not in manifest");
    }
    return it->second;
  }
  if (!f.fx || !f.fy || !f.cx || !f.cy) {
    throw CLI::ValidationError("project", "--fx, --fy, --cx and --cy are required without --manifest");
  }
  CameraCalib c;
  c.intrinsics = CameraIntrinsics{*f.fx, *f.fy, *f.cx, *f.cy};
  c.width = f.width.value_or(static_cast<int>(std::lround(2.0 * *f.cx)));
  c.height = f.height.value_or(static_cast<int>(std::lround(2.0 * *f.cy)));
  if (!f.rotation.empty()) {
    c.pose.rotation = Rot3::from_row_major(std::span<const double, 9>(f.rotation.data(), 9),
                                           kFileRotationTolerance);
  }
  if (!f.translation.empty()) {
    c.pose.translation = Vec3(f.translation[0], f.translation[1], f.translation[2]);
  }
  c.pose.frame = Frame::kWorld;
  c.pose.child = Frame::kCamera;
  c.validate();
  return c;
}

int cmd_project(const Flags& f, std::ostream& out) {
  if (f.point.empty() == f.pixel.empty()) {
    throw CLI::ValidationError("project", "give exactly one of --point or --pixel");
  }
  const CameraCalib calib = camera_from_flags(f);
  if (!f.point.empty()) {
    const Pixel p = project_point(calib, Vec3(f.point[0], f.point[1], f.point[2]));
    out << format_scalar(p.u) << ',' << format_scalar(p.v) << '\n';
  } else {
    const Vec3 p = unproject_to_plane(calib, Pixel{f.pixel[0], f.pixel[1]}, f.plane_z);
    out << format_scalar(p.x()) << ',' << format_scalar(p.y()) << ',' << format_scalar(p.z())
        << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Flags& f, const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  err << "simulate: " << f.experiment << " (seed " << cfg.harness.align.seed << ")\n";
  const harness::ExperimentReport r =
      harness::run_experiment(f.experiment, cfg.harness, cfg.harness.align.seed);
  if (cfg.out) {
    fs::create_directories(*cfg.out);
    write_json_file(*cfg.out / "report.json", r.to_json());
    write_text(*cfg.out / (f.experiment + ".csv"), r.to_csv());
    err << "simulate: wrote " << (*cfg.out / "report.json").string() << "\n";
  } else {
    out << r.to_json().dump(2) << '\n';
  }
  err << "simulate: " << f.experiment << " took " << r.elapsed_ms << " ms\n";
  return kExitOk;
}

}  // namespace

void merge_config(const Json& doc, CliConfig& cfg) {
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "config document must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "alignment") {
      merge_json(v, cfg.harness.align);
    } else if (key == "augment") {
      merge_json(v, cfg.harness.align.augment);
    } else if (key == "harness") {
      harness::merge_json(v, cfg.harness);
    } else if (key == "preprocess") {
      if (!v.is_object()) throw Error(ErrorCode::kParseError, "config section 'preprocess' must be an object");
      for (const auto& [k, x] : v.items()) {
        if (!x.is_number()) {
          throw Error(ErrorCode::kParseError, "config field 'preprocess." + k + "' must be a number");
        }
        if (k == "pixel_jitter") cfg.preprocess_pixel_jitter = x.get<double>();
        else if (k == "proprio_noise") cfg.preprocess_proprio_noise = x.get<double>();
        else throw Error(ErrorCode::kParseError, "unknown config field 'preprocess." + k + "'");
      }
    } else if (key == "workers") {
      if (!v.is_number_integer() || v.get<int>() < 0) {
        throw Error(ErrorCode::kParseError, "config field 'workers' must be a non-negative integer");
      }
      cfg.workers = v.get<int>();
    } else if (key == "out") {
      if (!v.is_string()) throw Error(ErrorCode::kParseError, "config field 'out' must be a string");
      cfg.out = v.get<std::string>();
    } else {
      throw Error(ErrorCode::kParseError, "unknown config section '" + key + "'");
    }
  }
}

Json preprocess_config_json(const CliConfig& cfg) {
  Json j;
  j["alignment"] = to_json(cfg.harness.align);
  j["augment"] = to_json(cfg.harness.align.augment);
  j["preprocess"] = {{"pixel_jitter", cfg.preprocess_pixel_jitter},
                     {"proprio_noise", cfg.preprocess_proprio_noise}};
  return j;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"End-effector-centric alignment of robot demonstrations", "tcpalign"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  add_global_options(app, f);

  auto* pre = app.add_subcommand("preprocess", "align every frame of a dataset");
  pre->add_option("--manifest", f.manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  auto* val = app.add_subcommand("validate", "check a dataset manifest");
  val->add_option("--manifest", f.manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  auto* proj = app.add_subcommand("project", "project a point or unproject a pixel");
  proj->add_option("--point", f.point, "world point x,y,z")->delimiter(',')->expected(3);
  proj->add_option("--pixel", f.pixel, "pixel u,v")->delimiter(',')->expected(2);
  proj->add_option("--plane-z", f.plane_z, "plane height for --pixel");
  proj->add_option("--manifest", f.manifest, "take the camera from a manifest")
      ->check(CLI::ExistingFile);
  proj->add_option("--camera", f.camera, "camera id in the manifest");
  proj->add_option("--fx", f.fx);
  proj->add_option("--fy", f.fy);
  proj->add_option("--cx", f.cx);
  proj->add_option("--cy", f.cy);
  proj->add_option("--width", f.width);
  proj->add_option("--height", f.height);
  proj->add_option("--camera-rotation", f.rotation, "camera-in-world rotation, 9 row-major")
      ->delimiter(',')
      ->expected(9);
  proj->add_option("--camera-translation", f.translation, "camera position x,y,z")
      ->delimiter(',')
      ->expected(3);

  auto* sim = app.add_subcommand("simulate", "run a synthetic experiment");
  sim->add_option("experiment", f.experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kExperiments), std::end(kExperiments))));
  sim->add_option("--n-scenes", f.n_scenes, "scenes in the invariance benchmark");
  sim->add_option("--n-demos", f.n_demos, "demonstrations for retrieval");
  sim->add_option("--n-eval", f.n_eval, "queries per shift family");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CliConfig cfg;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (f.config) {
      cfg.config_path = *f.config;
      merge_config(read_json_file(*f.config), cfg);
    }
    apply_flags(f, cfg);
    if (cfg.subcommand == "validate") return cmd_validate(f, out);
    if (cfg.subcommand == "preprocess") return cmd_preprocess(f, cfg, err);
    if (cfg.subcommand == "project") return cmd_project(f, out);
    return cmd_simulate(f, cfg, out, err);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace tcpalign::cli
