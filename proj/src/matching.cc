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

#include "bbev/matching.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "bbev/errors.h"
#include "fft.h"

namespace bbev {
namespace {

void RequireSameShape(const Descriptor& a, const Descriptor& b) {
  if (a.rings() != b.rings() || a.sectors() != b.sectors()) {
    throw Error(ErrorKind::kShapeMismatch,
                "descriptor shapes differ: " + std::to_string(a.rings()) +
                    "x" + std::to_string(a.sectors()) + " vs " +
                    std::to_string(b.rings()) + "x" +
                    std::to_string(b.sectors()));
  }
}

}  // namespace

const char* ToString(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kFused:
      return "fused";
    case ScoreMode::kCosine:
      return "cosine";
    case ScoreMode::kKl:
      return "kl";
  }
  return "fused";
}

ScoreMode ParseScoreMode(const std::string& text) {
  if (text == "fused") return ScoreMode::kFused;
  if (text == "cosine") return ScoreMode::kCosine;
  if (text == "kl") return ScoreMode::kKl;
  throw Error(ErrorKind::kInvalidParameter,
              "unknown score mode '" + text + "' (fused|cosine|kl)");
}

Eigen::VectorXd CircularCrossCorrelation(const Descriptor& map,
                                         const Descriptor& query) {
  RequireSameShape(map, query);
  const double norm = map.frobenius_norm() * query.frobenius_norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::kDegenerate,
                "cross-correlation of an all-zero height grid");
  }
  // conj(Fm) .* Fq summed over rings, then a single inverse transform.
  const Eigen::RowVectorXcd cross =
      (map.row_spectra().conjugate().array() * query.row_spectra().array())
          .colwise()
          .sum();
  Eigen::VectorXd cc(map.sectors());
  internal::ThreadFft().inv(cc.data(), cross.data(), map.sectors());
  return cc / norm;
}

int BestRotation(const Eigen::VectorXd& cc) {
  if (cc.size() == 0) return 0;
  const double best = cc.maxCoeff();
  constexpr double kTie = 1e-12;
  for (Eigen::Index d = 0; d < cc.size(); ++d) {
    if (cc(d) >= best - kTie) return static_cast<int>(d);
  }
  return 0;
}

AlignedBernoulli AlignQuery(const Descriptor& query, int delta_star) {
  return {ShiftColumns(query.mu(), delta_star),
          ShiftColumns(query.sigma(), delta_star)};
}

KlJaccard BernoulliKlJaccard(const Grid& mu_map, const Grid& sigma_map,
                             const Grid& mu_query, const Grid& sigma_query,
                             const PolarConfig& cfg) {
  if (mu_map.rows() != mu_query.rows() || mu_map.cols() != mu_query.cols() ||
      sigma_map.rows() != mu_map.rows() || sigma_map.cols() != mu_map.cols() ||
      sigma_query.rows() != mu_query.rows() ||
      sigma_query.cols() != mu_query.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "Bernoulli maps differ in shape");
  }
  const double eps = cfg.eps_bernoulli;
  double total = 0.0;
  Eigen::Index cells = 0;
  for (Eigen::Index r = 0; r < mu_map.rows(); ++r) {
    for (Eigen::Index s = 0; s < mu_map.cols(); ++s) {
      if (!(mu_map(r, s) + mu_query(r, s) > cfg.eps_union)) continue;
      const double p_m = Shrink(mu_map(r, s), sigma_map(r, s), eps);
      const double p_q = Shrink(mu_query(r, s), sigma_query(r, s), eps);
      total += SymmetricKl(p_m, p_q);
      ++cells;
    }
  }
  if (cells == 0) {
    throw Error(ErrorKind::kEmptyUnion, "soft union is empty");
  }
  return {std::exp(-total / static_cast<double>(cells)), cells};
}

MatchScore ScorePair(const Descriptor& map, const Descriptor& query,
                     ScoreMode mode) {
  const Eigen::VectorXd cc = CircularCrossCorrelation(map, query);
  MatchScore score;
  score.delta_star = BestRotation(cc);
  // Heights are non-negative, so only FFT rounding can leave [0, 1].
  score.cosine = std::clamp(cc(score.delta_star), 0.0, 1.0);

  const AlignedBernoulli aligned = AlignQuery(query, score.delta_star);
  try {
    const KlJaccard j = BernoulliKlJaccard(map.mu(), map.sigma(), aligned.mu,
                                           aligned.sigma, map.config());
    score.kl_jaccard = j.value;
    score.union_cells = j.union_cells;
    score.small_union = j.union_cells < kSmallUnionCells;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kEmptyUnion) throw;
    score.empty_union = true;
    score.kl_jaccard = 0.0;
    score.similarity = 0.0;
    score.distance = 1.0;
    return score;
  }

  switch (mode) {
    case ScoreMode::kFused:
      score.similarity = score.kl_jaccard * score.cosine;
      break;
    case ScoreMode::kCosine:
      score.similarity = score.cosine;
      break;
    case ScoreMode::kKl:
      score.similarity = score.kl_jaccard;
      break;
  }
  score.distance = 1.0 - score.similarity;
  return score;
}

}  // namespace bbev
