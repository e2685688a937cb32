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

#ifndef BBEV_EVAL_H_
#define BBEV_EVAL_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bbev/config.h"
#include "bbev/descriptor.h"
#include "bbev/kdtree.h"
#include "bbev/matching.h"
#include "bbev/pointcloud.h"
#include "bbev/retrieval.h"

namespace bbev {

struct EvalOptions {
  double d_gt = 10.0;       // m, inclusive, horizontal
  double exclusion = 25.0;  // m of trajectory arc length (online mode)
  int top_k = kDefaultTopK;
  ScoreMode mode = ScoreMode::kFused;
  // Multi-session only: keep a database frame every `db_spacing` meters of
  // arc length.
  bool subsample_db = true;
  double db_spacing = 5.0;
  int jobs = 1;
};

struct QueryRecord {
  FrameId query_id = 0;
  std::optional<FrameId> matched_id;
  double distance = 1.0;
  // At least one database frame lies within d_gt of the query.
  bool gt_positive = false;
  // The matched frame lies within d_gt of the query.
  bool correct = false;
  MatchScore score;
};

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PrSummary {
  std::vector<PrPoint> points;
  double auc = 0.0;
  double f1_max = 0.0;
  double recall_at_1 = 0.0;
  std::size_t queries = 0;
  std::size_t positives = 0;
  // No query had a ground-truth positive; metrics are reported as 0.
  bool degenerate = false;
};

struct EvalReport {
  std::string protocol;  // "online" or "multisession"
  std::vector<QueryRecord> records;
  PrSummary summary;
  PolarConfig config;
  EvalOptions options;
};

// Horizontal (x, y) distance <= d_gt.
bool WithinGroundTruth(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                       double d_gt);

// All (query frame_id, database frame_id) pairs within d_gt.
std::vector<std::pair<FrameId, FrameId>> GroundTruthPairs(
    const Trajectory& queries, const Trajectory& database, double d_gt);

// Cumulative horizontal path length at each frame, starting at 0.
std::vector<double> ArcLength(const Trajectory& trajectory);

// Indices of frames kept when sampling every `spacing` meters of arc
// length; the first frame is always kept.
std::vector<std::size_t> SubsampleBySpacing(const Trajectory& trajectory,
                                            double spacing);

// Single session: query i searches frames j < i whose arc-length distance
// to i exceeds options.exclusion. Queries without any such frame are
// skipped. `descriptors[i]` belongs to `trajectory.frames[i]`.
EvalReport OnlineEval(const std::vector<Descriptor>& descriptors,
                      const Trajectory& trajectory,
                      const EvalOptions& options = {});

// Every query searches the whole (optionally subsampled) database session.
EvalReport MultisessionEval(const std::vector<Descriptor>& query_descriptors,
                            const Trajectory& query_trajectory,
                            const std::vector<Descriptor>& db_descriptors,
                            const Trajectory& db_trajectory,
                            const EvalOptions& options = {});

// Threshold sweep over every observed distance: a query is declared a loop
// when it has a match with distance <= tau. Precision starts at the first
// swept point's value at recall 0 and AUC is the trapezoidal area under
// precision over recall.
PrSummary ComputePrCurve(const std::vector<QueryRecord>& records);

}  // namespace bbev

#endif  // BBEV_EVAL_H_
