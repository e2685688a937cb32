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

#ifndef BBEV_KDTREE_H_
#define BBEV_KDTREE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace bbev {

using FrameId = std::int64_t;

struct Neighbor {
  FrameId frame_id = 0;
  double distance = 0.0;  // Euclidean
};

// Exact k-nearest-neighbor search over the rows of a point matrix. Results
// are ordered by (distance, frame_id). Build once, then query from any
// number of threads.
class KdTree {
 public:
  using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>;
  using Filter = std::function<bool(FrameId)>;

  KdTree() = default;
  KdTree(Points points, std::vector<FrameId> ids);

  // Up to k neighbors among rows whose id passes `eligible` (all rows when
  // the filter is empty).
  std::vector<Neighbor> Search(const Eigen::Ref<const Eigen::VectorXd>& query,
                               int k, const Filter& eligible = {}) const;

  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }
  const Points& points() const { return points_; }
  const std::vector<FrameId>& ids() const { return ids_; }

 private:
  struct Node {
    Eigen::Index begin = 0;  // range into order_
    Eigen::Index end = 0;
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int Build(Eigen::Index begin, Eigen::Index end);

  Points points_;
  std::vector<FrameId> ids_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

}  // namespace bbev

#endif  // BBEV_KDTREE_H_
