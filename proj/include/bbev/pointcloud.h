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

#ifndef BBEV_POINTCLOUD_H_
#define BBEV_POINTCLOUD_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bbev {

// 3-D points in the sensor frame, one column per point, meters.
struct PointCloud {
  Eigen::Matrix3Xd xyz;
  // Non-finite returns discarded while loading.
  std::size_t dropped_nonfinite = 0;

  Eigen::Index size() const { return xyz.cols(); }
  bool empty() const { return xyz.cols() == 0; }
};

struct Frame {
  std::int64_t frame_id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<double> yaw;
};

// Frames ordered by strictly increasing frame_id.
struct Trajectory {
  std::vector<Frame> frames;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

// KITTI velodyne layout: little-endian float32 (x, y, z, intensity) per
// point, no header. Intensity is discarded.
PointCloud LoadScanBin(const std::filesystem::path& path);
PointCloud DecodeScanBin(const std::vector<std::uint8_t>& bytes);

// Writes the same layout with intensity 0. Coordinates are narrowed to
// float32.
void WriteScanBin(const std::filesystem::path& path, const PointCloud& cloud);

// One frame per line: 12 floats, row-major 3x4 [R | t]. Frame ids are the
// zero-based line numbers of non-blank lines.
Trajectory LoadPoses(const std::filesystem::path& path);
Trajectory ParsePoses(const std::string& text);

// Throws kInvalidParameter if any frame_id ordering or finiteness invariant
// is violated.
void ValidateTrajectory(const Trajectory& trajectory);

// Centroid of every occupied voxel of edge `voxel`; voxel index is
// floor(coordinate / voxel) per axis. Output order is first-seen order of
// the voxels in the input.
PointCloud VoxelDownsample(const PointCloud& cloud, double voxel);

using VoxelKey = Eigen::Matrix<std::int64_t, 3, 1>;

VoxelKey VoxelIndex(const Eigen::Vector3d& p, double voxel);

}  // namespace bbev

#endif  // BBEV_POINTCLOUD_H_
