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

#include "bbev/retrieval.h"

#include <string>
#include <utility>

#include "bbev/errors.h"

namespace bbev {
namespace {

KdTree::Points StackKeys(const std::vector<Eigen::VectorXd>& keys) {
  if (keys.empty()) {
    throw Error(ErrorKind::kInvalidParameter, "cannot index zero descriptors");
  }
  const Eigen::Index dim = keys.front().size();
  KdTree::Points points(static_cast<Eigen::Index>(keys.size()), dim);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].size() != dim) {
      throw Error(ErrorKind::kShapeMismatch,
                  "key " + std::to_string(i) + " has length " +
                      std::to_string(keys[i].size()) + ", expected " +
                      std::to_string(dim));
    }
    points.row(static_cast<Eigen::Index>(i)) = keys[i].transpose();
  }
  return points;
}

std::vector<FrameId> Iota(std::size_t n) {
  std::vector<FrameId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<FrameId>(i);
  return ids;
}

std::vector<Eigen::VectorXd> KeysOf(const std::vector<Descriptor>& ds) {
  std::vector<Eigen::VectorXd> keys;
  keys.reserve(ds.size());
  for (const Descriptor& d : ds) keys.push_back(d.key());
  return keys;
}

}  // namespace

DescriptorIndex::DescriptorIndex(const std::vector<Eigen::VectorXd>& keys,
                                 std::vector<FrameId> frame_ids)
    : tree_(StackKeys(keys), std::move(frame_ids)) {}

std::vector<Neighbor> DescriptorIndex::QueryTopK(
    const Eigen::VectorXd& key, int k, const KdTree::Filter& eligible) const {
  return tree_.Search(key, k, eligible);
}

DescriptorIndex BuildIndex(const std::vector<Descriptor>& descriptors) {
  return BuildIndex(descriptors, Iota(descriptors.size()));
}

DescriptorIndex BuildIndex(const std::vector<Descriptor>& descriptors,
                           std::vector<FrameId> frame_ids) {
  return DescriptorIndex(KeysOf(descriptors), std::move(frame_ids));
}

DescriptorDatabase::DescriptorDatabase(std::vector<Descriptor> descriptors)
    : DescriptorDatabase(std::move(descriptors), {}) {}

DescriptorDatabase::DescriptorDatabase(std::vector<Descriptor> descriptors,
                                       std::vector<FrameId> frame_ids)
    : descriptors_(std::move(descriptors)),
      frame_ids_(frame_ids.empty() ? Iota(descriptors_.size())
                                   : std::move(frame_ids)),
      index_(BuildIndex(descriptors_, frame_ids_)) {
  for (std::size_t i = 0; i < frame_ids_.size(); ++i) {
    if (!slot_.emplace(frame_ids_[i], i).second) {
      throw Error(ErrorKind::kInvalidParameter,
                  "duplicate frame id " + std::to_string(frame_ids_[i]));
    }
  }
}

const Descriptor& DescriptorDatabase::at(FrameId id) const {
  const auto it = slot_.find(id);
  if (it == slot_.end()) {
    throw Error(ErrorKind::kInvalidParameter,
                "unknown frame id " + std::to_string(id));
  }
  return descriptors_[it->second];
}

std::optional<Retrieval> RetrieveBest(const DescriptorDatabase& db,
                                      const Descriptor& query, int k,
                                      const KdTree::Filter& eligible,
                                      ScoreMode mode) {
  std::optional<Retrieval> best;
  for (const Neighbor& candidate :
       db.index().QueryTopK(query.key(), k, eligible)) {
    Retrieval r;
    r.frame_id = candidate.frame_id;
    r.key_distance = candidate.distance;
    try {
      r.score = ScorePair(db.at(candidate.frame_id), query, mode);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerate) throw;
      r.degenerate = true;
      r.score = MatchScore{};
    }
    if (!best || r.score.distance < best->score.distance ||
        (r.score.distance == best->score.distance &&
         r.frame_id < best->frame_id)) {
      best = r;
    }
  }
  return best;
}

std::optional<Retrieval> RetrieveBest(
    const DescriptorDatabase& db, const Descriptor& query, int k,
    const std::unordered_set<FrameId>& exclusion, ScoreMode mode) {
  return RetrieveBest(
      db, query, k,
      [&exclusion](FrameId id) { return !exclusion.contains(id); }, mode);
}

}  // namespace bbev
