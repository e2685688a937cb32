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

#include <algorithm>
#include <random>

#include "doctest.h"

#include "bbev/descriptor.h"
#include "bbev/retrieval.h"
#include "bbev/synth.h"
#include "test_util.h"

namespace bbev {
namespace {

using testing::KindOf;

std::vector<Eigen::VectorXd> RandomKeys(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::VectorXd> keys(n, Eigen::VectorXd(dim));
  for (auto& k : keys) {
    for (Eigen::Index i = 0; i < dim; ++i) k(i) = u(rng);
  }
  return keys;
}

std::vector<FrameId> Ids(int n) {
  std::vector<FrameId> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

std::vector<Neighbor> LinearScan(const std::vector<Eigen::VectorXd>& keys,
                                 const Eigen::VectorXd& q, int k) {
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    all.push_back({static_cast<FrameId>(i), (keys[i] - q).norm()});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance
                                    : a.frame_id < b.frame_id;
  });
  all.resize(std::min<std::size_t>(all.size(), k));
  return all;
}

// Two passes of the square loop; shared by the tests that need real scans.
const std::vector<Descriptor>& LoopDescriptors() {
  static const std::vector<Descriptor> descriptors = [] {
    LoopSpec spec;
    spec.lateral_offset = 1.0;
    const SyntheticSequence seq = GenerateLoop(spec);
    std::vector<Descriptor> out;
    for (const PointCloud& scan : seq.scans) {
      out.push_back(MakeDescriptor(scan, PolarConfig{}));
    }
    return out;
  }();
  return descriptors;
}

TEST_CASE("single-entry index") {
  const auto keys = RandomKeys(1, 80, 1);
  const DescriptorIndex index(keys, {42});
  const auto hits = index.QueryTopK(keys[0], 5);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].frame_id == 42);
  CHECK(hits[0].distance == 0.0);
}

TEST_CASE("a stored key finds itself at distance zero") {
  const auto keys = RandomKeys(100, 80, 2);
  const DescriptorIndex index(keys, Ids(100));
  for (int i : {0, 17, 99}) {
    const auto hits = index.QueryTopK(keys[i], 1);
    CHECK(hits[0].frame_id == i);
    CHECK(hits[0].distance == 0.0);
  }
}

TEST_CASE("K at least N returns everything in order") {
  const auto keys = RandomKeys(30, 8, 3);
  const DescriptorIndex index(keys, Ids(30));
  const Eigen::VectorXd q = RandomKeys(1, 8, 4)[0];
  const auto hits = index.QueryTopK(q, 50);
  CHECK(hits.size() == 30);
  CHECK(std::is_sorted(hits.begin(), hits.end(),
                       [](const Neighbor& a, const Neighbor& b) {
                         return a.distance < b.distance;
                       }));
}

TEST_CASE("duplicate keys come back in frame id order") {
  const Eigen::VectorXd k = Eigen::VectorXd::Constant(4, 0.5);
  const DescriptorIndex index({k, k, k}, {9, 3, 5});
  const auto hits = index.QueryTopK(k, 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].frame_id == 3);
  CHECK(hits[1].frame_id == 5);
  CHECK(hits[2].frame_id == 9);
}

TEST_CASE("index construction errors") {
  CHECK(KindOf([] { DescriptorIndex({}, {}); }) == ErrorKind::kInvalidParameter);
  CHECK(KindOf([] {
          DescriptorIndex({Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(5)},
                          {0, 1});
        }) == ErrorKind::kShapeMismatch);
}

TEST_CASE("KD-tree search equals a linear scan") {
  const auto keys = RandomKeys(200, 80, 5);
  const DescriptorIndex index(keys, Ids(200));
  const auto queries = RandomKeys(500, 80, 6);
  for (const auto& q : queries) {
    const auto got = index.QueryTopK(q, 10);
    const auto want = LinearScan(keys, q, 10);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].frame_id == want[i].frame_id);
      CHECK(got[i].distance == doctest::Approx(want[i].distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("filtered search skips ineligible frames") {
  const auto keys = RandomKeys(50, 6, 7);
  const DescriptorIndex index(keys, Ids(50));
  const auto hits = index.QueryTopK(keys[10], 5, [](FrameId id) { return id % 2; });
  REQUIRE(hits.size() == 5);
  for (const auto& h : hits) CHECK(h.frame_id % 2 == 1);
  CHECK(index.QueryTopK(keys[0], 5, [](FrameId) { return false; }).empty());
}

TEST_CASE("retrieving a stored descriptor returns it") {
  std::vector<Descriptor> ds;
  for (std::uint64_t s = 0; s < 5; ++s) {
    ds.push_back(MakeDescriptor(testing::RandomCloud(1500, s), PolarConfig{}));
  }
  const DescriptorDatabase db(ds, {10, 11, 12, 13, 14});
  const auto best = RetrieveBest(db, ds[2], kDefaultTopK);
  REQUIRE(best);
  CHECK(best->frame_id == 12);
  CHECK(best->score.distance <= 1e-6);
  CHECK(KindOf([&] { db.at(7); }) == ErrorKind::kInvalidParameter);

  const auto none = RetrieveBest(db, ds[2], kDefaultTopK,
                                 std::unordered_set<FrameId>{10, 11, 12, 13, 14});
  CHECK(!none);
  const auto other = RetrieveBest(db, ds[2], kDefaultTopK,
                                  std::unordered_set<FrameId>{12});
  REQUIRE(other);
  CHECK(other->frame_id != 12);
}

TEST_CASE("a rotated query retrieves its source") {
  std::vector<Descriptor> ds;
  std::vector<PointCloud> clouds;
  PolarConfig cfg;
  cfg.voxel = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    SceneSpec spec;
    spec.seed = s;
    clouds.push_back(GenerateScene(spec));
    ds.push_back(MakeDescriptor(clouds.back(), cfg));
  }
  const DescriptorDatabase db(ds);
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    const Descriptor q = MakeDescriptor(
        TransformCloud(clouds[i], 17 * cfg.sector_width(), Eigen::Vector2d::Zero()),
        cfg);
    const auto best = RetrieveBest(db, q, kDefaultTopK);
    REQUIRE(best);
    CHECK(best->frame_id == static_cast<FrameId>(i));
    CHECK(best->score.delta_star == 17);
  }
}

TEST_CASE("top-K shortlist agrees with exhaustive re-ranking") {
  const auto& all = LoopDescriptors();
  const std::size_t half = all.size() / 2;
  const std::vector<Descriptor> first(all.begin(), all.begin() + half);
  const DescriptorDatabase db(first);
  const int n = static_cast<int>(first.size());
  int agree = 0;
  int queries = 0;
  double previous_mean = 2.0;
  for (int k : {1, 5, kDefaultTopK, n}) {
    double sum = 0.0;
    for (std::size_t i = half; i < all.size(); ++i) {
      sum += RetrieveBest(db, all[i], k)->score.distance;
    }
    // More candidates can only lower the best re-ranked distance.
    CHECK(sum / half <= previous_mean + 1e-12);
    previous_mean = sum / half;
  }
  for (std::size_t i = half; i < all.size(); ++i) {
    const auto full = RetrieveBest(db, all[i], n);
    const auto top = RetrieveBest(db, all[i], kDefaultTopK);
    agree += full->frame_id == top->frame_id;
    ++queries;
  }
  MESSAGE("top-1 agreement " << agree << "/" << queries);
  CHECK(agree >= 0.95 * queries);
}

}  // namespace
}  // namespace bbev
