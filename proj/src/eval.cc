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

#include "bbev/eval.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "bbev/errors.h"
#include "bbev/parallel.h"

namespace bbev {
namespace {

void RequireAligned(const std::vector<Descriptor>& descriptors,
                    const Trajectory& trajectory, const char* what) {
  if (descriptors.size() != trajectory.size()) {
    throw Error(ErrorKind::kInvalidParameter,
                std::string(what) + ": " + std::to_string(descriptors.size()) +
                    " descriptors for " + std::to_string(trajectory.size()) +
                    " poses");
  }
  ValidateTrajectory(trajectory);
}

std::vector<FrameId> IdsOf(const Trajectory& trajectory) {
  std::vector<FrameId> ids;
  ids.reserve(trajectory.size());
  for (const Frame& f : trajectory.frames) ids.push_back(f.frame_id);
  return ids;
}

void FillMatch(const std::optional<Retrieval>& best,
               const Eigen::Vector3d& query_position,
               const Trajectory& database_poses,
               const std::unordered_map<FrameId, std::size_t>& pose_slot,
               double d_gt, QueryRecord& record) {
  if (!best) return;
  record.matched_id = best->frame_id;
  record.score = best->score;
  record.distance = std::clamp(best->score.distance, 0.0, 1.0);
  const Frame& matched = database_poses.frames[pose_slot.at(best->frame_id)];
  record.correct = WithinGroundTruth(query_position, matched.position, d_gt);
}

}  // namespace

bool WithinGroundTruth(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                       double d_gt) {
  return (a.head<2>() - b.head<2>()).norm() <= d_gt;
}

std::vector<std::pair<FrameId, FrameId>> GroundTruthPairs(
    const Trajectory& queries, const Trajectory& database, double d_gt) {
  std::vector<std::pair<FrameId, FrameId>> pairs;
  for (const Frame& q : queries.frames) {
    for (const Frame& m : database.frames) {
      if (WithinGroundTruth(q.position, m.position, d_gt)) {
        pairs.emplace_back(q.frame_id, m.frame_id);
      }
    }
  }
  return pairs;
}

std::vector<double> ArcLength(const Trajectory& trajectory) {
  std::vector<double> arc(trajectory.size(), 0.0);
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    arc[i] = arc[i - 1] + (trajectory.frames[i].position.head<2>() -
                           trajectory.frames[i - 1].position.head<2>())
                              .norm();
  }
  return arc;
}

std::vector<std::size_t> SubsampleBySpacing(const Trajectory& trajectory,
                                            double spacing) {
  std::vector<std::size_t> kept;
  if (trajectory.empty()) return kept;
  const std::vector<double> arc = ArcLength(trajectory);
  kept.push_back(0);
  for (std::size_t i = 1; i < arc.size(); ++i) {
    if (arc[i] - arc[kept.back()] >= spacing) kept.push_back(i);
  }
  return kept;
}

EvalReport OnlineEval(const std::vector<Descriptor>& descriptors,
                      const Trajectory& trajectory,
                      const EvalOptions& options) {
  RequireAligned(descriptors, trajectory, "online eval");
  EvalReport report;
  report.protocol = "online";
  report.options = options;
  if (descriptors.empty()) {
    report.summary = ComputePrCurve(report.records);
    return report;
  }
  report.config = descriptors.front().config();

  const std::vector<FrameId> ids = IdsOf(trajectory);
  const DescriptorDatabase db(descriptors, ids);
  const std::vector<double> arc = ArcLength(trajectory);
  std::unordered_map<FrameId, std::size_t> pose_slot;
  for (std::size_t i = 0; i < ids.size(); ++i) pose_slot.emplace(ids[i], i);

  const std::size_t n = descriptors.size();
  std::vector<std::optional<QueryRecord>> slots(n);
  ParallelFor(n, options.jobs, [&](std::size_t i) {
    // Frames j < i with arc[i] - arc[j] > exclusion form a prefix [0, count).
    const auto count = static_cast<std::size_t>(
        std::lower_bound(arc.begin(), arc.begin() + static_cast<long>(i),
                         arc[i] - options.exclusion) -
        arc.begin());
    if (count == 0) return;
    const FrameId last_eligible = ids[count - 1];

    QueryRecord record;
    record.query_id = ids[i];
    const Eigen::Vector3d& position = trajectory.frames[i].position;
    for (std::size_t j = 0; j < count && !record.gt_positive; ++j) {
      record.gt_positive = WithinGroundTruth(
          position, trajectory.frames[j].position, options.d_gt);
    }
    const auto best = RetrieveBest(
        db, descriptors[i], options.top_k,
        [last_eligible](FrameId id) { return id <= last_eligible; },
        options.mode);
    FillMatch(best, position, trajectory, pose_slot, options.d_gt, record);
    slots[i] = record;
  });

  for (auto& slot : slots) {
    if (slot) report.records.push_back(std::move(*slot));
  }
  report.summary = ComputePrCurve(report.records);
  return report;
}

EvalReport MultisessionEval(const std::vector<Descriptor>& query_descriptors,
                            const Trajectory& query_trajectory,
                            const std::vector<Descriptor>& db_descriptors,
                            const Trajectory& db_trajectory,
                            const EvalOptions& options) {
  RequireAligned(query_descriptors, query_trajectory, "multisession queries");
  RequireAligned(db_descriptors, db_trajectory, "multisession database");
  if (query_descriptors.empty() || db_descriptors.empty()) {
    throw Error(ErrorKind::kInvalidParameter,
                "multisession eval needs non-empty sessions");
  }

  std::vector<std::size_t> kept;
  if (options.subsample_db) {
    kept = SubsampleBySpacing(db_trajectory, options.db_spacing);
  } else {
    kept.resize(db_descriptors.size());
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = i;
  }
  Trajectory db_poses;
  std::vector<Descriptor> db_subset;
  db_subset.reserve(kept.size());
  for (std::size_t i : kept) {
    db_poses.frames.push_back(db_trajectory.frames[i]);
    db_subset.push_back(db_descriptors[i]);
  }
  const std::vector<FrameId> db_ids = IdsOf(db_poses);
  const DescriptorDatabase db(std::move(db_subset), db_ids);
  std::unordered_map<FrameId, std::size_t> pose_slot;
  for (std::size_t i = 0; i < db_ids.size(); ++i) {
    pose_slot.emplace(db_ids[i], i);
  }

  EvalReport report;
  report.protocol = "multisession";
  report.options = options;
  report.config = query_descriptors.front().config();
  report.records.resize(query_descriptors.size());
  ParallelFor(query_descriptors.size(), options.jobs, [&](std::size_t i) {
    QueryRecord& record = report.records[i];
    record.query_id = query_trajectory.frames[i].frame_id;
    const Eigen::Vector3d& position = query_trajectory.frames[i].position;
    for (const Frame& m : db_poses.frames) {
      if (WithinGroundTruth(position, m.position, options.d_gt)) {
        record.gt_positive = true;
        break;
      }
    }
    const auto best = RetrieveBest(db, query_descriptors[i], options.top_k,
                                   KdTree::Filter{}, options.mode);
    FillMatch(best, position, db_poses, pose_slot, options.d_gt, record);
  });
  report.summary = ComputePrCurve(report.records);
  return report;
}

PrSummary ComputePrCurve(const std::vector<QueryRecord>& records) {
  PrSummary summary;
  summary.queries = records.size();
  std::size_t correct = 0;
  for (const QueryRecord& r : records) {
    if (r.gt_positive) ++summary.positives;
    if (r.correct) ++correct;
  }
  summary.degenerate = summary.positives == 0;

  std::vector<const QueryRecord*> declared;
  for (const QueryRecord& r : records) {
    if (r.matched_id) declared.push_back(&r);
  }
  std::stable_sort(declared.begin(), declared.end(),
                   [](const QueryRecord* a, const QueryRecord* b) {
                     return a->distance < b->distance;
                   });

  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t declared_positive = 0;
  for (std::size_t i = 0; i < declared.size();) {
    const double tau = declared[i]->distance;
    for (; i < declared.size() && declared[i]->distance == tau; ++i) {
      if (declared[i]->correct) {
        ++tp;
      } else {
        ++fp;
      }
      if (declared[i]->gt_positive) ++declared_positive;
    }
    const std::size_t fn = summary.positives - declared_positive;
    PrPoint p;
    p.threshold = tau;
    p.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    p.recall = tp + fn > 0
                   ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                   : 0.0;
    p.f1 = p.precision + p.recall > 0.0
               ? 2.0 * p.precision * p.recall / (p.precision + p.recall)
               : 0.0;
    summary.points.push_back(p);
  }

  if (summary.degenerate) return summary;

  double prev_recall = 0.0;
  double prev_precision =
      summary.points.empty() ? 0.0 : summary.points.front().precision;
  for (const PrPoint& p : summary.points) {
    summary.auc += (p.recall - prev_recall) * 0.5 *
                   (p.precision + prev_precision);
    prev_recall = p.recall;
    prev_precision = p.precision;
    summary.f1_max = std::max(summary.f1_max, p.f1);
  }
  summary.recall_at_1 =
      static_cast<double>(correct) / static_cast<double>(summary.positives);
  return summary;
}

}  // namespace bbev
