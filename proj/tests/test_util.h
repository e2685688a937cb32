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

#ifndef BBEV_TESTS_TEST_UTIL_H_
#define BBEV_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>

#include "bbev/config.h"
#include "bbev/descriptor.h"
#include "bbev/errors.h"
#include "bbev/pointcloud.h"

namespace bbev::testing {

inline PointCloud RandomCloud(int n, std::uint64_t seed, double extent = 60.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-extent, extent);
  std::uniform_real_distribution<double> z(-2.0, 4.0);
  PointCloud cloud;
  cloud.xyz.resize(3, n);
  for (int i = 0; i < n; ++i) cloud.xyz.col(i) << xy(rng), xy(rng), z(rng);
  return cloud;
}

inline Occupancy RandomOccupancy(int rings, int sectors, double p,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  Occupancy o(rings, sectors);
  for (Eigen::Index i = 0; i < o.size(); ++i) o.data()[i] = coin(rng);
  return o;
}

inline PointCloud Points(std::initializer_list<Eigen::Vector3d> pts) {
  PointCloud cloud;
  cloud.xyz.resize(3, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index i = 0;
  for (const auto& p : pts) cloud.xyz.col(i++) = p;
  return cloud;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bbev_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename F>
ErrorKind KindOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected a bbev::Error");
}

}  // namespace bbev::testing

#endif  // BBEV_TESTS_TEST_UTIL_H_
