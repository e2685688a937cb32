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

#include "bbev/pointcloud.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "bbev/errors.h"

namespace bbev {
namespace {

float DecodeFloatLe(const std::uint8_t* bytes) {
  std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                       (static_cast<std::uint32_t>(bytes[1]) << 8) |
                       (static_cast<std::uint32_t>(bytes[2]) << 16) |
                       (static_cast<std::uint32_t>(bytes[3]) << 24);
  return std::bit_cast<float>(bits);
}

void EncodeFloatLe(float value, char* out) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) {
    out[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  }
}

std::uint64_t Mix(std::uint64_t h) {
  // splitmix64 finalizer.
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

std::uint64_t HashVoxel(const VoxelKey& k) {
  std::uint64_t h = Mix(static_cast<std::uint64_t>(k.x()));
  h = Mix(h ^ static_cast<std::uint64_t>(k.y()));
  return Mix(h ^ static_cast<std::uint64_t>(k.z()));
}

}  // namespace

PointCloud DecodeScanBin(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t kStride = 16;
  if (bytes.size() % kStride != 0) {
    throw Error(ErrorKind::kMalformed,
                "scan length " + std::to_string(bytes.size()) +
                    " bytes is not a multiple of 16");
  }
  const std::size_t n = bytes.size() / kStride;
  PointCloud cloud;
  cloud.xyz.resize(3, static_cast<Eigen::Index>(n));
  Eigen::Index kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* rec = bytes.data() + i * kStride;
    const float x = DecodeFloatLe(rec);
    const float y = DecodeFloatLe(rec + 4);
    const float z = DecodeFloatLe(rec + 8);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      ++cloud.dropped_nonfinite;
      continue;
    }
    cloud.xyz.col(kept++) << x, y, z;
  }
  cloud.xyz.conservativeResize(3, kept);
  return cloud;
}

PointCloud LoadScanBin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open scan " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIo, "read failed for " + path.string());
  }
  try {
    return DecodeScanBin(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void WriteScanBin(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string buffer(static_cast<std::size_t>(cloud.size()) * 16, '\0');
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    char* rec = buffer.data() + i * 16;
    EncodeFloatLe(static_cast<float>(cloud.xyz(0, i)), rec);
    EncodeFloatLe(static_cast<float>(cloud.xyz(1, i)), rec + 4);
    EncodeFloatLe(static_cast<float>(cloud.xyz(2, i)), rec + 8);
    EncodeFloatLe(0.0f, rec + 12);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write scan " + path.string());
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "write failed for " + path.string());
  }
}

Trajectory ParsePoses(const std::string& text) {
  Trajectory trajectory;
  std::istringstream lines(text);
  std::string line;
  int line_number = 0;
  std::int64_t frame_id = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse, "pose line " +
                                           std::to_string(line_number) +
                                           ": bad number '" + token + "'");
      }
    }
    if (values.size() != 12) {
      throw Error(ErrorKind::kParse,
                  "pose line " + std::to_string(line_number) + ": expected 12 "
                      "fields, got " + std::to_string(values.size()));
    }
    Frame frame;
    frame.frame_id = frame_id++;
    frame.position << values[3], values[7], values[11];
    if (!frame.position.allFinite()) {
      throw Error(ErrorKind::kParse, "pose line " +
                                         std::to_string(line_number) +
                                         ": non-finite translation");
    }
    // Rotation block rows are values[0..2], [4..6], [8..10].
    frame.yaw = std::atan2(values[4], values[0]);
    trajectory.frames.push_back(frame);
  }
  return trajectory;
}

Trajectory LoadPoses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open poses " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParsePoses(text.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void ValidateTrajectory(const Trajectory& trajectory) {
  for (std::size_t i = 0; i < trajectory.frames.size(); ++i) {
    const Frame& f = trajectory.frames[i];
    if (!f.position.allFinite()) {
      throw Error(ErrorKind::kInvalidParameter,
                  "frame " + std::to_string(f.frame_id) +
                      " has a non-finite position");
    }
    if (i > 0 && f.frame_id <= trajectory.frames[i - 1].frame_id) {
      throw Error(ErrorKind::kInvalidParameter,
                  "frame ids must be strictly increasing");
    }
  }
}

VoxelKey VoxelIndex(const Eigen::Vector3d& p, double voxel) {
  return (p / voxel).array().floor().cast<std::int64_t>().matrix();
}

PointCloud VoxelDownsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0) || !std::isfinite(voxel)) {
    throw Error(ErrorKind::kInvalidParameter,
                "voxel size must be positive, got " + std::to_string(voxel));
  }
  if (cloud.empty()) {
    throw Error(ErrorKind::kEmptyCloud, "cannot downsample an empty cloud");
  }

  // Open addressing with linear probing. Each bucket packs the upper hash
  // bits with slot + 1 into one word, and each voxel keeps its key and
  // running sum in one record, so a point touches about two cache lines.
  struct Accumulator {
    Eigen::Vector3d sum;
    VoxelKey key;
    std::int64_t count;
  };
  std::size_t capacity = 16;
  while (capacity < 2 * static_cast<std::size_t>(cloud.size())) capacity *= 2;
  const std::size_t mask = capacity - 1;
  std::vector<std::uint64_t> table(capacity, 0);
  std::vector<Accumulator> voxels;
  voxels.reserve(static_cast<std::size_t>(cloud.size()));

  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d p = cloud.xyz.col(i);
    const VoxelKey key = VoxelIndex(p, voxel);
    const std::uint64_t h = HashVoxel(key);
    const std::uint64_t tag = h & 0xffffffff00000000ull;
    std::size_t b = h & mask;
    Accumulator* hit = nullptr;
    for (; table[b] != 0; b = (b + 1) & mask) {
      if ((table[b] & 0xffffffff00000000ull) != tag) continue;
      Accumulator& a = voxels[(table[b] & 0xffffffffull) - 1];
      if (a.key == key) {
        hit = &a;
        break;
      }
    }
    if (hit) {
      hit->sum += p;
      ++hit->count;
    } else {
      voxels.push_back({p, key, 1});
      table[b] = tag | voxels.size();
    }
  }

  PointCloud out;
  out.dropped_nonfinite = cloud.dropped_nonfinite;
  out.xyz.resize(3, static_cast<Eigen::Index>(voxels.size()));
  for (std::size_t k = 0; k < voxels.size(); ++k) {
    out.xyz.col(static_cast<Eigen::Index>(k)) =
        voxels[k].sum / static_cast<double>(voxels[k].count);
  }
  return out;
}

}  // namespace bbev
