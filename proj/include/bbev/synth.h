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

#ifndef BBEV_SYNTH_H_
#define BBEV_SYNTH_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "bbev/config.h"
#include "bbev/descriptor.h"
#include "bbev/pointcloud.h"

namespace bbev {

// Synthetic scenes and the brute-force / Monte-Carlo oracles. Nothing in
// here reuses the blur, binning or FFT code of the descriptor and matching
// modules, so the oracles stay independent of what they check.

enum class Archetype { kBox, kCylinder };

// Vertical structure standing on the ground plane.
struct Structure {
  Archetype archetype = Archetype::kBox;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d half_extent = Eigen::Vector2d::Ones();  // box only
  double radius = 1.0;                                    // cylinder only
  double height = 5.0;
};

struct SceneSpec {
  std::uint64_t seed = 42;
  int n_structures = 40;
  double area = 140.0;  // side of the square centered on the sensor, m
  int points_per_structure = 300;
  double noise_std = 0.03;  // m, isotropic surface noise
  double sensor_height = 1.73;
  double min_size = 1.0;   // box half extent / cylinder radius range, m
  double max_size = 6.0;
  double min_height = 2.0;
  double max_height = 12.0;
  double clear_radius = 4.0;  // no structure footprint within this range
  // Ground returns from a spinning sensor: beams at evenly spaced downward
  // elevations, each tracing a circle on the ground. 0 beams disables them.
  int ground_beams = 0;
  int ground_points_per_beam = 720;
  double min_beam_elevation_deg = -24.9;
  double max_beam_elevation_deg = -2.0;
  // Structures are opaque: a point is kept only if no structure footprint
  // lies between it and the sensor along its azimuth.
  bool occlusion = false;
  int occlusion_bins = 1440;
};

// Deterministic structures for a scene: identical seeds give identical
// layouts.
std::vector<Structure> GenerateStructures(const SceneSpec& spec);

// Samples `spec.points_per_structure` surface points per structure seen
// from a sensor at (x, y, yaw) in the world, returned in the sensor frame.
// Points at horizontal range >= max_range are left out; pass infinity to
// keep everything.
PointCloud SampleScan(const std::vector<Structure>& world,
                      const Eigen::Vector3d& sensor_pose,
                      const SceneSpec& spec, std::uint64_t seed,
                      double max_range);

// Scene around a sensor at the origin. n_structures == 0 gives an empty
// cloud.
PointCloud GenerateScene(const SceneSpec& spec);

// p' = Rz(yaw) p + (t, 0). z is unchanged.
PointCloud TransformCloud(const PointCloud& cloud, double yaw,
                          const Eigen::Vector2d& translation);

// Scene used by the loop harness: 160 structures over the whole loop area,
// 48 ground beams and occlusion.
SceneSpec LidarLikeScene();

// Square loop driven `passes` times; later passes are shifted sideways by
// `lateral_offset` m (toward the inside of the square) and along the path
// by `along_offset` m.
struct LoopSpec {
  SceneSpec scene = LidarLikeScene();
  double side = 160.0;       // square side, m
  double spacing = 4.0;      // frame spacing along the path, m
  int passes = 2;
  double lateral_offset = 0.0;
  double along_offset = 0.0;
  double yaw_noise = 0.0;    // rad, uniform in [-yaw_noise, yaw_noise]
  double corridor = 5.0;     // structures keep this far from the path, m
  double margin = 60.0;      // structures extend this far beyond the square
};

struct SyntheticSequence {
  std::vector<PointCloud> scans;
  Trajectory trajectory;  // yaw populated
};

SyntheticSequence GenerateLoop(const LoopSpec& spec,
                               double max_range = 80.0);

// Monte-Carlo estimate of the translation-marginalized occupancy. Each
// sample draws a Cartesian offset, moves every cell center by it, re-bins
// the moved center and reads the occupancy there (0 outside the grid).
// The offset has standard deviation sigma_t along the cell's radial
// direction. Along the tangent it is sigma_t (kIsotropic) or
// sigma_t * sqrt(rho), with rho the occupancy rate of either the cell's own
// ring (kCellRing) or the ring reached by the radial component of the
// offset (kLandingRing).
enum class TangentialSpread { kIsotropic, kCellRing, kLandingRing };

struct MonteCarloEstimate {
  Grid mu;
  Grid std_error;  // per-cell standard error of the sample mean
};

MonteCarloEstimate MonteCarloMu(
    const Occupancy& occupancy, const PolarConfig& cfg, int n_samples,
    std::uint64_t seed,
    TangentialSpread spread = TangentialSpread::kLandingRing);

// Literal triple-loop evaluation of the normalized circular
// cross-correlation. Throws kDegenerate for a zero grid.
Eigen::VectorXd BruteForceCc(const Grid& map_height, const Grid& query_height);

struct RobustnessRow {
  double offset = 0.0;
  double sigma_t = 0.0;
  double mean_jkl = 0.0;
  double std_jkl = 0.0;
};

// For every frame (scene seeds seed .. seed + frames - 1), offset and
// direction in {0, 120, 240} degrees, translates the scan, builds both
// descriptors with each sigma_t, and averages the Bernoulli-KL Jaccard at
// zero rotation. Rows are ordered by offset, then sigma_t.
std::vector<RobustnessRow> RobustnessSweep(
    const SceneSpec& scene, const std::vector<double>& offsets,
    const std::vector<double>& sigma_t_values, const PolarConfig& base,
    int frames = 7, int jobs = 1);

}  // namespace bbev

#endif  // BBEV_SYNTH_H_
