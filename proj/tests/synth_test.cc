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

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bbev/descriptor.h"
#include "bbev/synth.h"
#include "test_util.h"

namespace bbev {
namespace {

using testing::KindOf;
constexpr double kPi = std::numbers::pi;

TEST_CASE("scene generation is deterministic") {
  SceneSpec spec;
  spec.seed = 5;
  const PointCloud a = GenerateScene(spec);
  const PointCloud b = GenerateScene(spec);
  CHECK(a.xyz == b.xyz);
  spec.seed = 6;
  CHECK(GenerateScene(spec).xyz != a.xyz);
  const auto sa = GenerateStructures(spec);
  const auto sb = GenerateStructures(spec);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i].center == sb[i].center);
}

TEST_CASE("no structures gives an empty scene") {
  SceneSpec spec;
  spec.n_structures = 0;
  CHECK(GenerateScene(spec).empty());
}

TEST_CASE("structures occupy at least one cell each") {
  SceneSpec spec;
  spec.n_structures = 20;
  const PolarGrid g = BuildPolarGrid(GenerateScene(spec), PolarConfig{});
  CHECK(g.occupancy.cast<int>().sum() >= 20);
}

TEST_CASE("ground beams add returns below the sensor") {
  SceneSpec spec;
  spec.ground_beams = 8;
  const PointCloud cloud = GenerateScene(spec);
  int ground = 0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    if (std::abs(cloud.xyz(2, i) + spec.sensor_height) < 0.2) ++ground;
  }
  // Every beam lands well inside max range.
  CHECK(ground >= 8 * spec.ground_points_per_beam);
}

TEST_CASE("occlusion hides a structure behind another") {
  SceneSpec spec;
  spec.noise_std = 0.0;
  spec.occlusion = true;
  Structure near_box, far_box;
  near_box.center = {10.0, 0.0};
  far_box.center = {30.0, 0.0};
  const std::vector<Structure> world = {near_box, far_box};
  const PointCloud seen = SampleScan(world, {0, 0, 0}, spec, 1, 80.0);
  REQUIRE(!seen.empty());
  CHECK(seen.xyz.row(0).maxCoeff() < 11.5);

  spec.occlusion = false;
  const PointCloud all = SampleScan(world, {0, 0, 0}, spec, 1, 80.0);
  CHECK(all.xyz.row(0).maxCoeff() > 28.0);
  CHECK(all.size() > seen.size());
}

TEST_CASE("scans are expressed in the sensor frame") {
  SceneSpec spec;
  spec.noise_std = 0.0;
  Structure box;
  box.center = {20.0, 0.0};
  // Sensor at (20, -10) facing +y: the box is 10 m straight ahead.
  const PointCloud c =
      SampleScan({box}, {20.0, -10.0, kPi / 2}, spec, 3, 80.0);
  REQUIRE(!c.empty());
  CHECK(c.xyz.row(0).mean() == doctest::Approx(9.5).epsilon(0.05));
  CHECK(std::abs(c.xyz.row(1).mean()) < 0.5);
}

TEST_CASE("cloud transform") {
  const PointCloud c = testing::RandomCloud(200, 1);
  CHECK(TransformCloud(c, 0.0, Eigen::Vector2d::Zero()).xyz == c.xyz);
  const PointCloud twice =
      TransformCloud(TransformCloud(c, kPi, {0, 0}), kPi, {0, 0});
  CHECK((twice.xyz - c.xyz).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::Vector2d t(3.0, -1.5);
  const PointCloud moved = TransformCloud(c, 0.7, t);
  const PointCloud back =
      TransformCloud(TransformCloud(moved, 0.0, -t), -0.7, {0, 0});
  CHECK((back.xyz - c.xyz).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(moved.xyz.row(2) == c.xyz.row(2));
}

TEST_CASE("Monte-Carlo marginalization") {
  PolarConfig cfg;
  const Occupancy o = testing::RandomOccupancy(40, 60, 0.3, 2);
  SUBCASE("sigma_t = 0 reproduces the occupancy") {
    cfg.sigma_t = 0.0;
    const auto mc = MonteCarloMu(o, cfg, 50, 1);
    CHECK(mc.mu == o.cast<double>());
    CHECK(mc.std_error.isZero(0.0));
  }
  SUBCASE("a full grid stays full away from the border") {
    const auto mc = MonteCarloMu(Occupancy::Ones(40, 60), cfg, 500, 1);
    CHECK(mc.mu.middleRows(3, 34).minCoeff() >= 0.99);
    CHECK(mc.mu.row(39).mean() < 0.9);
  }
  SUBCASE("standard error grows by sqrt 2 when samples halve") {
    const auto full = MonteCarloMu(o, cfg, 4000, 3);
    const auto half = MonteCarloMu(o, cfg, 2000, 4);
    const double ratio = half.std_error.mean() / full.std_error.mean();
    CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  }
  SUBCASE("errors") {
    CHECK(KindOf([&] { MonteCarloMu(o, cfg, 0, 1); }) ==
          ErrorKind::kInvalidParameter);
  }
}

TEST_CASE("brute-force correlation") {
  Grid g = Grid::Zero(4, 10);
  g(2, 3) = 2.0;
  Grid q = Grid::Zero(4, 10);
  q(2, 7) = 5.0;
  const Eigen::VectorXd cc = BruteForceCc(g, q);
  for (int d = 0; d < 10; ++d) CHECK(cc(d) == (d == 4 ? 1.0 : 0.0));
  const Eigen::VectorXd self = BruteForceCc(g, g);
  CHECK(self(0) == 1.0);
  CHECK(KindOf([&] { BruteForceCc(g, Grid::Zero(4, 10)); }) ==
        ErrorKind::kDegenerate);
  CHECK(KindOf([&] { BruteForceCc(g, Grid::Zero(4, 9)); }) ==
        ErrorKind::kShapeMismatch);
}

TEST_CASE("loop generator") {
  LoopSpec spec;
  spec.side = 40.0;
  spec.spacing = 4.0;
  spec.lateral_offset = 2.0;
  spec.along_offset = 1.0;
  spec.scene.n_structures = 30;
  const SyntheticSequence seq = GenerateLoop(spec);
  REQUIRE(seq.scans.size() == 80);
  REQUIRE(seq.trajectory.size() == 80);
  // First pass starts at the origin heading +x; the second is shifted 2 m
  // to the left and 1 m ahead.
  CHECK(seq.trajectory.frames[0].position.isZero(1e-12));
  CHECK((seq.trajectory.frames[40].position - Eigen::Vector3d(1, 2, 0)).norm() <
        1e-9);
  for (const auto& f : seq.trajectory.frames) CHECK(f.yaw.has_value());
  for (const auto& s : seq.scans) CHECK(!s.empty());
}

TEST_CASE("robustness sweep") {
  SceneSpec scene;
  const auto rows = RobustnessSweep(scene, {0.0, 1.0, 3.0}, {0.0, 2.0},
                                    PolarConfig{}, 3, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].offset == 0.0);
  CHECK(rows[0].sigma_t == 0.0);
  CHECK(rows[1].sigma_t == 2.0);
  CHECK(rows[2].offset == 1.0);
  for (int k = 0; k < 2; ++k) {
    CHECK(rows[k].mean_jkl == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rows[k].std_jkl <= 1e-12);
    CHECK(rows[k + 2].mean_jkl > rows[k + 4].mean_jkl);
  }
  // Marginalization keeps offset scans more alike.
  CHECK(rows[3].mean_jkl > rows[2].mean_jkl);
  CHECK(rows[5].mean_jkl > rows[4].mean_jkl);

  const auto again = RobustnessSweep(scene, {0.0, 1.0, 3.0}, {0.0, 2.0},
                                     PolarConfig{}, 3, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].mean_jkl == rows[i].mean_jkl);
  }
  CHECK(KindOf([&] { RobustnessSweep(scene, {0.0}, {0.0}, PolarConfig{}, 0); }) ==
        ErrorKind::kInvalidParameter);
}

}  // namespace
}  // namespace bbev
