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

#ifndef BBEV_RETRIEVAL_H_
#define BBEV_RETRIEVAL_H_

#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bbev/descriptor.h"
#include "bbev/kdtree.h"
#include "bbev/matching.h"

namespace bbev {

inline constexpr int kDefaultTopK = 25;

// KD-tree over the 2R-dimensional ring keys.
class DescriptorIndex {
 public:
  // Throws kInvalidParameter on an empty key set and kShapeMismatch on
  // inconsistent key lengths or id count.
  DescriptorIndex(const std::vector<Eigen::VectorXd>& keys,
                  std::vector<FrameId> frame_ids);

  // Exact K nearest keys by Euclidean distance, ascending, ties by frame_id.
  std::vector<Neighbor> QueryTopK(const Eigen::VectorXd& key, int k,
                                  const KdTree::Filter& eligible = {}) const;

  Eigen::Index size() const { return tree_.size(); }
  const std::vector<FrameId>& frame_ids() const { return tree_.ids(); }

 private:
  KdTree tree_;
};

DescriptorIndex BuildIndex(const std::vector<Descriptor>& descriptors);
DescriptorIndex BuildIndex(const std::vector<Descriptor>& descriptors,
                           std::vector<FrameId> frame_ids);

// Descriptors plus their key index. Frame ids default to 0..N-1.
class DescriptorDatabase {
 public:
  explicit DescriptorDatabase(std::vector<Descriptor> descriptors);
  DescriptorDatabase(std::vector<Descriptor> descriptors,
                     std::vector<FrameId> frame_ids);

  const DescriptorIndex& index() const { return index_; }
  const std::vector<Descriptor>& descriptors() const { return descriptors_; }
  const std::vector<FrameId>& frame_ids() const { return frame_ids_; }
  // Throws kInvalidParameter for an unknown id.
  const Descriptor& at(FrameId id) const;
  std::size_t size() const { return descriptors_.size(); }

 private:
  std::vector<Descriptor> descriptors_;
  std::vector<FrameId> frame_ids_;
  std::unordered_map<FrameId, std::size_t> slot_;
  DescriptorIndex index_;
};

struct Retrieval {
  FrameId frame_id = 0;
  MatchScore score;
  double key_distance = 0.0;
  bool degenerate = false;  // scored distance 1 because CC was undefined
};

// Top-K key candidates among eligible frames, re-ranked by the full pair
// distance; ties fall to the smaller frame_id. nullopt when no frame is
// eligible.
std::optional<Retrieval> RetrieveBest(const DescriptorDatabase& db,
                                      const Descriptor& query, int k,
                                      const KdTree::Filter& eligible = {},
                                      ScoreMode mode = ScoreMode::kFused);

std::optional<Retrieval> RetrieveBest(
    const DescriptorDatabase& db, const Descriptor& query, int k,
    const std::unordered_set<FrameId>& exclusion,
    ScoreMode mode = ScoreMode::kFused);

}  // namespace bbev

#endif  // BBEV_RETRIEVAL_H_
