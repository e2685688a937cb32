/*
 * Copyright 2026 The bbev Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "bbev/config.h"
#include "bbev/descriptor.h"
#include "bbev/errors.h"
#include "bbev/eval.h"
#include "bbev/io.h"
#include "bbev/matching.h"
#include "bbev/parallel.h"
#include "bbev/pointcloud.h"
#include "bbev/retrieval.h"
#include "bbev/synth.h"

namespace bbev::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// A usage problem found after CLI11 accepted the flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int ExitFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
      return kUsage;
    case ErrorKind::kIo:
    case ErrorKind::kMalformed:
      return kIoFailure;
    default:
      return kDataFailure;
  }
}

struct ConfigFlags {
  PolarConfig cfg;
  std::optional<double> theta_cap;

  void Add(CLI::App* app) {
    app->add_option("--rings", cfg.rings, "Ring count")->capture_default_str();
    app->add_option("--sectors", cfg.sectors, "Sector count")
        ->capture_default_str();
    app->add_option("--max-range", cfg.max_range, "Grid radius, m")
        ->capture_default_str();
    app->add_option("--sigma-t", cfg.sigma_t,
                    "Translation uncertainty, m (0 = binary occupancy)")
        ->capture_default_str();
    app->add_option("--eps-bernoulli", cfg.eps_bernoulli,
                    "Clamp for shrunk probabilities")
        ->capture_default_str();
    app->add_option("--eps-union", cfg.eps_union, "Soft-union threshold")
        ->capture_default_str();
    app->add_option("--voxel", cfg.voxel, "Voxel edge, m (0 disables)")
        ->capture_default_str();
    app->add_option("--height-offset", cfg.height_offset,
                    "Added to z before max-height binning, m")
        ->capture_default_str();
    app->add_option("--kernel-truncation", cfg.kernel_truncation,
                    "Gaussian kernel radius in sigmas")
        ->capture_default_str();
    app->add_option("--sigma-theta-cap", theta_cap,
                    "Angular kernel width cap, sectors (default sectors/4)");
  }

  PolarConfig Resolve() const {
    PolarConfig out = cfg;
    out.sigma_theta_cap = theta_cap;
    try {
      out.Validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return out;
  }
};

void AddSceneFlags(CLI::App* app, SceneSpec& spec) {
  app->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  app->add_option("--n-structures", spec.n_structures, "Structure count")
      ->capture_default_str();
  app->add_option("--area", spec.area, "Side of the scene square, m")
      ->capture_default_str();
  app->add_option("--points-per-structure", spec.points_per_structure,
                  "Surface samples per structure")
      ->capture_default_str();
  app->add_option("--noise-std", spec.noise_std, "Surface noise, m")
      ->capture_default_str();
  app->add_option("--sensor-height", spec.sensor_height, "m")
      ->capture_default_str();
  app->add_option("--ground-beams", spec.ground_beams,
                  "Ground-hitting beams (0 = no ground)")
      ->capture_default_str();
  app->add_option("--occlusion", spec.occlusion,
                  "Treat structures as opaque (true/false)")
      ->capture_default_str();
}

// Every long flag gets an environment fallback: --sigma-t -> BBEV_SIGMA_T.
void AttachEnv(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") {
      continue;
    }
    std::string name = "BBEV_" + opt->get_lnames().front();
    std::transform(name.begin(), name.end(), name.begin(), [](char c) {
      return c == '-' ? '_' : static_cast<char>(std::toupper(c));
    });
    opt->envname(name);
  }
  for (CLI::App* sub : app->get_subcommands({})) AttachEnv(sub);
}

// Expands directories into their files with `extension`, sorted by name.
std::vector<fs::path> ExpandInputs(const std::vector<std::string>& inputs,
                                   const std::string& extension) {
  std::vector<fs::path> files;
  for (const std::string& input : inputs) {
    const fs::path path(input);
    if (fs::is_directory(path)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(path);
    }
  }
  return files;
}

double Percentile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
}

// Builds descriptors for every scan in order; all must succeed.
std::vector<Descriptor> DescribeAll(const std::vector<fs::path>& scans,
                                    const PolarConfig& cfg, int jobs) {
  std::vector<std::optional<Descriptor>> slots(scans.size());
  ParallelFor(scans.size(), jobs, [&](std::size_t i) {
    try {
      slots[i] = MakeDescriptor(LoadScanBin(scans[i]), cfg);
    } catch (const Error& e) {
      throw Error(e.kind(), scans[i].string() + ": " + e.what());
    }
  });
  std::vector<Descriptor> out;
  out.reserve(scans.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

Trajectory LoadTrajectory(const fs::path& path, const std::string& convention) {
  Trajectory trajectory = LoadPoses(path);
  if (convention == "kitti-camera") {
    // Camera frame: x right, y down, z forward. Map to x forward, z up.
    for (Frame& f : trajectory.frames) {
      const Eigen::Vector3d p = f.position;
      f.position = {p.z(), -p.x(), -p.y()};
      f.yaw.reset();
    }
  }
  return trajectory;
}

// ---------------------------------------------------------------------------

struct DescribeArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  int jobs = 1;
  ConfigFlags config;
};

int RunDescribe(const DescribeArgs& args, std::ostream& out,
                std::ostream& err) {
  const PolarConfig cfg = args.config.Resolve();
  const std::vector<fs::path> scans = ExpandInputs(args.inputs, ".bin");
  if (scans.empty()) throw UsageError("describe: no .bin scans found");
  EnsureDirectory(args.out_dir);

  using Outcome = std::variant<std::pair<Descriptor, double>, Error>;
  std::vector<std::optional<Outcome>> outcomes(scans.size());
  ParallelFor(scans.size(), args.jobs, [&](std::size_t i) {
    try {
      const PointCloud cloud = LoadScanBin(scans[i]);
      const auto start = std::chrono::steady_clock::now();
      Descriptor d = MakeDescriptor(cloud, cfg);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      outcomes[i] = Outcome(std::in_place_index<0>, std::move(d), ms);
    } catch (const Error& e) {
      outcomes[i] = Outcome(std::in_place_index<1>, e);
    }
  });

  std::vector<double> timings;
  std::optional<ErrorKind> first_failure;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const fs::path target =
        fs::path(args.out_dir) / (scans[i].stem().string() + ".bbd");
    try {
      if (const auto* e = std::get_if<Error>(&*outcomes[i])) throw *e;
      const auto& [descriptor, ms] = std::get<0>(*outcomes[i]);
      SaveDescriptor(target, descriptor);
      timings.push_back(ms);
    } catch (const Error& e) {
      err << "error: " << scans[i].string() << ": " << e.what() << "\n";
      if (!first_failure) first_failure = e.kind();
    }
  }

  double mean = 0.0;
  for (double t : timings) mean += t;
  if (!timings.empty()) mean /= static_cast<double>(timings.size());
  const json summary{
      {"described", timings.size()},
      {"failed", scans.size() - timings.size()},
      {"construction_ms",
       {{"mean", mean},
        {"p50", Percentile(timings, 0.50)},
        {"p90", Percentile(timings, 0.90)},
        {"p99", Percentile(timings, 0.99)},
        {"max", Percentile(timings, 1.0)}}},
      {"config", ToJson(cfg)}};
  out << summary.dump() << "\n";

  if (!first_failure) return kOk;
  return timings.empty() ? ExitFor(*first_failure) : kPartialFailure;
}

struct MatchArgs {
  std::string map_path;
  std::string query_path;
  std::string mode = "fused";
};

int RunMatch(const MatchArgs& args, std::ostream& out) {
  const Descriptor map = LoadDescriptor(args.map_path);
  const Descriptor query = LoadDescriptor(args.query_path);
  if (map.rings() != query.rings() || map.sectors() != query.sectors()) {
    throw Error(ErrorKind::kShapeMismatch, "descriptors differ in grid shape");
  }
  const ScoreMode mode = ParseScoreMode(args.mode);
  json result = ToJson(ScorePair(map, query, mode));
  result["score_mode"] = ToString(mode);
  result["config"] = ToJson(map.config());
  if (!(map.config() == query.config())) {
    result["query_config"] = ToJson(query.config());
  }
  out << result.dump(2) << "\n";
  return kOk;
}

struct IndexArgs {
  std::vector<std::string> inputs;
  std::string manifest;
};

int RunIndex(const IndexArgs& args, std::ostream& out) {
  const std::vector<fs::path> files = ExpandInputs(args.inputs, ".bbd");
  if (files.empty()) throw UsageError("index: no .bbd descriptors found");
  std::vector<ManifestEntry> entries;
  std::optional<PolarConfig> cfg;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Descriptor d = LoadDescriptor(files[i]);
    if (!cfg) {
      cfg = d.config();
    } else if (!(d.config() == *cfg)) {
      throw Error(ErrorKind::kShapeMismatch,
                  files[i].string() + ": config differs from " +
                      files.front().string());
    }
    entries.push_back({static_cast<FrameId>(i), fs::absolute(files[i])});
  }
  const fs::path manifest = fs::absolute(args.manifest);
  if (manifest.has_parent_path()) EnsureDirectory(manifest.parent_path());
  WriteManifest(manifest, entries, *cfg);
  // Reload to prove the index is usable.
  const DescriptorDatabase db = LoadDatabase(manifest);
  out << json{{"frames", db.size()},
              {"manifest", manifest.string()},
              {"config", ToJson(*cfg)}}
             .dump()
      << "\n";
  return kOk;
}

struct EvalArgs {
  std::string scans;
  std::string poses;
  std::string db_scans;
  std::string db_poses;
  std::string protocol = "online";
  std::string pose_convention = "xyz";
  std::string out_dir;
  std::string mode = "fused";
  EvalOptions options;
  bool no_subsample = false;
  ConfigFlags config;
};

int RunEval(EvalArgs args, std::ostream& out) {
  const PolarConfig cfg = args.config.Resolve();
  args.options.mode = ParseScoreMode(args.mode);
  args.options.subsample_db = !args.no_subsample;
  if (args.options.top_k < 1) throw UsageError("--topk must be >= 1");
  if (args.options.d_gt <= 0.0) throw UsageError("--dgt must be positive");

  auto load_session = [&](const std::string& scan_dir,
                          const std::string& pose_file) {
    const std::vector<fs::path> scans = ExpandInputs({scan_dir}, ".bin");
    Trajectory trajectory = LoadTrajectory(pose_file, args.pose_convention);
    if (scans.size() != trajectory.size()) {
      throw Error(ErrorKind::kShapeMismatch,
                  scan_dir + ": " + std::to_string(scans.size()) +
                      " scans but " + std::to_string(trajectory.size()) +
                      " poses in " + pose_file);
    }
    return std::make_pair(DescribeAll(scans, cfg, args.options.jobs),
                          std::move(trajectory));
  };

  EvalReport report;
  const auto queries = load_session(args.scans, args.poses);
  if (args.protocol == "online") {
    report = OnlineEval(queries.first, queries.second, args.options);
  } else if (args.protocol == "multisession") {
    if (args.db_scans.empty() || args.db_poses.empty()) {
      throw UsageError("multisession needs --db-scans and --db-poses");
    }
    const auto database = load_session(args.db_scans, args.db_poses);
    report = MultisessionEval(queries.first, queries.second, database.first,
                              database.second, args.options);
  } else {
    throw UsageError("unknown protocol '" + args.protocol + "'");
  }
  report.config = cfg;

  EnsureDirectory(args.out_dir);
  const fs::path dir(args.out_dir);
  WriteText(dir / "report.json", ToJson(report).dump(2) + "\n");
  WriteText(dir / "pr_curve.csv", PrCurveCsv(report));
  WriteText(dir / "summary.csv", SummaryCsv(report));
  const PrSummary& s = report.summary;
  out << json{{"protocol", report.protocol},
              {"queries", s.queries},
              {"positives", s.positives},
              {"auc", s.auc},
              {"recall_at_1", s.recall_at_1},
              {"f1_max", s.f1_max},
              {"degenerate", s.degenerate}}
             .dump()
      << "\n";
  return kOk;
}

struct RobustnessArgs {
  SceneSpec scene;
  std::vector<double> offsets = {0, 1, 2, 3, 4};
  std::vector<double> sigmas = {0, 2, 4};
  int frames = 7;
  int jobs = 1;
  std::string out_path;
  ConfigFlags config;
};

int RunRobustness(const RobustnessArgs& args, std::ostream& out) {
  const PolarConfig cfg = args.config.Resolve();
  if (std::find(args.offsets.begin(), args.offsets.end(), 0.0) ==
      args.offsets.end()) {
    throw UsageError("--offsets must include 0");
  }
  if (args.frames < 1) throw UsageError("--frames must be >= 1");
  const auto rows = RobustnessSweep(args.scene, args.offsets, args.sigmas, cfg,
                                    args.frames, args.jobs);
  const json snapshot{{"config", ToJson(cfg)},
                      {"seed", args.scene.seed},
                      {"n_structures", args.scene.n_structures},
                      {"area", args.scene.area},
                      {"points_per_structure", args.scene.points_per_structure},
                      {"noise_std", args.scene.noise_std},
                      {"ground_beams", args.scene.ground_beams},
                      {"occlusion", args.scene.occlusion},
                      {"frames", args.frames}};
  const std::string csv = RobustnessCsv(rows, snapshot);
  if (args.out_path.empty()) {
    out << csv;
  } else {
    WriteText(args.out_path, csv);
  }
  return kOk;
}

json SceneJson(const SceneSpec& spec) {
  return json{{"seed", spec.seed},
              {"n_structures", spec.n_structures},
              {"area", spec.area},
              {"points_per_structure", spec.points_per_structure},
              {"noise_std", spec.noise_std},
              {"sensor_height", spec.sensor_height},
              {"ground_beams", spec.ground_beams},
              {"occlusion", spec.occlusion}};
}

std::string PoseLine(const Frame& f) {
  const double yaw = f.yaw.value_or(0.0);
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  char line[512];
  std::snprintf(line, sizeof(line),
                "%.17g %.17g 0 %.17g %.17g %.17g 0 %.17g 0 0 1 %.17g\n", c, -s,
                f.position.x(), s, c, f.position.y(), f.position.z());
  return line;
}

struct SynthSceneArgs {
  SceneSpec scene;
  std::string out_path;
};

int RunSynthScene(const SynthSceneArgs& args, std::ostream& out) {
  const PointCloud cloud = GenerateScene(args.scene);
  const fs::path path(args.out_path);
  if (path.has_parent_path()) EnsureDirectory(path.parent_path());
  WriteScanBin(path, cloud);
  fs::path meta = path;
  meta.replace_extension(".json");
  const json snapshot{{"scene", SceneJson(args.scene)},
                      {"points", cloud.size()}};
  WriteText(meta, snapshot.dump(2) + "\n");
  out << snapshot.dump() << "\n";
  return kOk;
}

struct SynthLoopArgs {
  LoopSpec loop;
  double max_range = PolarConfig{}.max_range;
  std::string out_dir;
};

int RunSynthLoop(const SynthLoopArgs& args, std::ostream& out) {
  if (args.loop.spacing <= 0.0 || args.loop.side <= 0.0) {
    throw UsageError("--side and --spacing must be positive");
  }
  const SyntheticSequence seq = GenerateLoop(args.loop, args.max_range);
  const fs::path dir(args.out_dir);
  EnsureDirectory(dir / "scans");
  std::string poses;
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.bin", i);
    WriteScanBin(dir / "scans" / name, seq.scans[i]);
    poses += PoseLine(seq.trajectory.frames[i]);
  }
  WriteText(dir / "poses.txt", poses);
  const LoopSpec& l = args.loop;
  const json snapshot{{"scene", SceneJson(l.scene)},
                      {"side", l.side},
                      {"spacing", l.spacing},
                      {"passes", l.passes},
                      {"lateral_offset", l.lateral_offset},
                      {"along_offset", l.along_offset},
                      {"yaw_noise", l.yaw_noise},
                      {"corridor", l.corridor},
                      {"margin", l.margin},
                      {"max_range", args.max_range},
                      {"frames", seq.scans.size()}};
  WriteText(dir / "synth.json", snapshot.dump(2) + "\n");
  out << snapshot.dump() << "\n";
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bernoulli polar BEV place recognition", "bbev"};
  app.require_subcommand(1);

  DescribeArgs describe_args;
  auto* describe =
      app.add_subcommand("describe", "Build descriptor files from scans");
  describe->add_option("inputs", describe_args.inputs, ".bin scans or dirs")
      ->required();
  describe->add_option("--out", describe_args.out_dir, "Output directory")
      ->required();
  describe->add_option("--jobs", describe_args.jobs, "Worker threads")
      ->capture_default_str();
  describe_args.config.Add(describe);

  MatchArgs match_args;
  auto* match = app.add_subcommand("match", "Score a descriptor pair");
  match->add_option("map", match_args.map_path, "Map descriptor")->required();
  match->add_option("query", match_args.query_path, "Query descriptor")
      ->required();
  match->add_option("--score-mode", match_args.mode, "fused, cosine or kl")
      ->check(CLI::IsMember({"fused", "cosine", "kl"}))
      ->capture_default_str();

  IndexArgs index_args;
  auto* index =
      app.add_subcommand("index", "Write a retrieval manifest over descriptors");
  index->add_option("inputs", index_args.inputs, ".bbd files or dirs")
      ->required();
  index->add_option("--out", index_args.manifest, "Manifest path")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Place-recognition evaluation");
  eval->add_option("--scans", eval_args.scans, "Query scan directory")
      ->required();
  eval->add_option("--poses", eval_args.poses, "Query pose file")->required();
  eval->add_option("--db-scans", eval_args.db_scans,
                   "Database scan directory (multisession)");
  eval->add_option("--db-poses", eval_args.db_poses,
                   "Database pose file (multisession)");
  eval->add_option("--protocol", eval_args.protocol, "online or multisession")
      ->check(CLI::IsMember({"online", "multisession"}))
      ->capture_default_str();
  eval->add_option("--pose-convention", eval_args.pose_convention,
                   "xyz (z up) or kitti-camera (y down, z forward)")
      ->check(CLI::IsMember({"xyz", "kitti-camera"}))
      ->capture_default_str();
  eval->add_option("--out", eval_args.out_dir, "Output directory")->required();
  eval->add_option("--score-mode", eval_args.mode, "fused, cosine or kl")
      ->check(CLI::IsMember({"fused", "cosine", "kl"}))
      ->capture_default_str();
  eval->add_option("--topk", eval_args.options.top_k, "KD-tree candidates")
      ->capture_default_str();
  eval->add_option("--dgt", eval_args.options.d_gt,
                   "Ground-truth radius, m (inclusive)")
      ->capture_default_str();
  eval->add_option("--exclusion", eval_args.options.exclusion,
                   "Online exclusion along the trajectory, m")
      ->capture_default_str();
  eval->add_option("--db-spacing", eval_args.options.db_spacing,
                   "Multisession database spacing, m")
      ->capture_default_str();
  eval->add_flag("--no-subsample", eval_args.no_subsample,
                 "Keep every multisession database frame");
  eval->add_option("--jobs", eval_args.options.jobs, "Worker threads")
      ->capture_default_str();
  eval_args.config.Add(eval);

  RobustnessArgs robustness_args;
  auto* robustness = app.add_subcommand(
      "robustness", "Similarity under increasing translation");
  AddSceneFlags(robustness, robustness_args.scene);
  robustness->add_option("--offsets", robustness_args.offsets, "m, include 0")
      ->delimiter(',')
      ->capture_default_str();
  robustness->add_option("--sigmas", robustness_args.sigmas, "sigma_t values")
      ->delimiter(',')
      ->capture_default_str();
  robustness->add_option("--frames", robustness_args.frames, "Scenes averaged")
      ->capture_default_str();
  robustness->add_option("--jobs", robustness_args.jobs, "Worker threads")
      ->capture_default_str();
  robustness->add_option("--out", robustness_args.out_path,
                         "CSV path (default stdout)");
  robustness_args.config.Add(robustness);

  auto* synth = app.add_subcommand("synth", "Generate synthetic scans");
  synth->require_subcommand(1);
  SynthSceneArgs scene_args;
  auto* synth_scene = synth->add_subcommand("scene", "One scan at the origin");
  AddSceneFlags(synth_scene, scene_args.scene);
  synth_scene->add_option("--out", scene_args.out_path, ".bin path")
      ->required();
  SynthLoopArgs loop_args;
  auto* synth_loop =
      synth->add_subcommand("loop", "Square loop driven several times");
  AddSceneFlags(synth_loop, loop_args.loop.scene);
  synth_loop->add_option("--side", loop_args.loop.side, "Square side, m")
      ->capture_default_str();
  synth_loop->add_option("--spacing", loop_args.loop.spacing, "Frame spacing, m")
      ->capture_default_str();
  synth_loop->add_option("--passes", loop_args.loop.passes, "Laps")
      ->capture_default_str();
  synth_loop->add_option("--lateral-offset", loop_args.loop.lateral_offset,
                         "Sideways shift of later laps, m")
      ->capture_default_str();
  synth_loop->add_option("--along-offset", loop_args.loop.along_offset,
                         "Shift of later laps along the path, m")
      ->capture_default_str();
  synth_loop->add_option("--yaw-noise", loop_args.loop.yaw_noise, "rad")
      ->capture_default_str();
  synth_loop->add_option("--max-range", loop_args.max_range, "Scan range, m")
      ->capture_default_str();
  synth_loop->add_option("--out", loop_args.out_dir, "Output directory")
      ->required();

  AttachEnv(&app);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*describe) return RunDescribe(describe_args, out, err);
    if (*match) return RunMatch(match_args, out);
    if (*index) return RunIndex(index_args, out);
    if (*eval) return RunEval(eval_args, out);
    if (*robustness) return RunRobustness(robustness_args, out);
    if (*synth_scene) return RunSynthScene(scene_args, out);
    if (*synth_loop) return RunSynthLoop(loop_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  }
  return kUsage;
}

}  // namespace bbev::cli
