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

#include "bbev/kdtree.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "bbev/errors.h"

namespace bbev {
namespace {

constexpr Eigen::Index kLeafSize = 8;

struct HeapEntry {
  double d2;
  FrameId id;
};

// Max-heap on (d2, id): the top is the current worst candidate.
struct WorseFirst {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
  }
};

}  // namespace

KdTree::KdTree(Points points, std::vector<FrameId> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
  if (static_cast<Eigen::Index>(ids_.size()) != points_.rows()) {
    throw Error(ErrorKind::kShapeMismatch,
                "kd-tree: " + std::to_string(ids_.size()) + " ids for " +
                    std::to_string(points_.rows()) + " points");
  }
  order_.resize(static_cast<std::size_t>(points_.rows()));
  for (Eigen::Index i = 0; i < points_.rows(); ++i) order_[i] = i;
  if (points_.rows() > 0) Build(0, points_.rows());
}

int KdTree::Build(Eigen::Index begin, Eigen::Index end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return index;

  int axis = 0;
  double widest = -1.0;
  for (Eigen::Index c = 0; c < points_.cols(); ++c) {
    double lo = points_(order_[begin], c);
    double hi = lo;
    for (Eigen::Index i = begin + 1; i < end; ++i) {
      const double v = points_(order_[i], c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = static_cast<int>(c);
    }
  }
  if (widest <= 0.0) return index;  // all points coincide: keep as a leaf

  const Eigen::Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
                     return points_(a, axis) < points_(b, axis);
                   });
  const double split = points_(order_[mid], axis);
  const int left = Build(begin, mid);
  const int right = Build(mid, end);
  Node& node = nodes_[index];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return index;
}

std::vector<Neighbor> KdTree::Search(
    const Eigen::Ref<const Eigen::VectorXd>& query, int k,
    const Filter& eligible) const {
  if (query.size() != points_.cols() && points_.rows() > 0) {
    throw Error(ErrorKind::kShapeMismatch,
                "kd-tree query of dimension " + std::to_string(query.size()) +
                    ", index has " + std::to_string(points_.cols()));
  }
  if (k < 1 || points_.rows() == 0) return {};

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, WorseFirst> best;
  const auto full = [&] { return static_cast<int>(best.size()) >= k; };
  const auto offer = [&](double d2, FrameId id) {
    if (!full()) {
      best.push({d2, id});
    } else if (WorseFirst{}({d2, id}, best.top())) {
      best.pop();
      best.push({d2, id});
    }
  };

  // Explicit stack of (node, lower bound on squared distance).
  std::vector<std::pair<int, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    const auto [index, bound] = stack.back();
    stack.pop_back();
    if (full() && bound > best.top().d2) continue;
    const Node& node = nodes_[index];
    if (node.axis < 0) {
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index row = order_[i];
        const FrameId id = ids_[row];
        if (eligible && !eligible(id)) continue;
        double d2 = 0.0;
        for (Eigen::Index c = 0; c < points_.cols(); ++c) {
          const double diff = points_(row, c) - query(c);
          d2 += diff * diff;
        }
        offer(d2, id);
      }
      continue;
    }
    const double diff = query(node.axis) - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    // Far side first so the near side is popped next.
    stack.emplace_back(far, std::max(bound, diff * diff));
    stack.emplace_back(near, bound);
  }

  std::vector<Neighbor> out(best.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = {best.top().id, std::sqrt(best.top().d2)};
    best.pop();
  }
  return out;
}

}  // namespace bbev
