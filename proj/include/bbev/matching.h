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

#ifndef BBEV_MATCHING_H_
#define BBEV_MATCHING_H_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "bbev/descriptor.h"

namespace bbev {

enum class ScoreMode {
  kFused,   // J_KL * C
  kCosine,  // C only
  kKl,      // J_KL only
};

const char* ToString(ScoreMode mode);
// Accepts "fused", "cosine", "kl"; throws kInvalidParameter otherwise.
ScoreMode ParseScoreMode(const std::string& text);

struct MatchScore {
  int delta_star = 0;
  double cosine = 0.0;
  double kl_jaccard = 0.0;
  double similarity = 0.0;
  double distance = 1.0;
  Eigen::Index union_cells = 0;
  // Soft union had no cells; the pair is scored distance 1.
  bool empty_union = false;
  // Fewer than kSmallUnionCells cells in the soft union.
  bool small_union = false;
};

inline constexpr Eigen::Index kSmallUnionCells = 5;

// Normalized circular cross-correlation of the height grids,
//   CC[d] = sum_{r,s} Gm[r,s] Gq[r,(s+d) mod S] / (|Gm|_F |Gq|_F),
// evaluated from the precomputed row spectra with one inverse FFT.
// Throws kShapeMismatch or kDegenerate (zero-norm height grid).
Eigen::VectorXd CircularCrossCorrelation(const Descriptor& map,
                                         const Descriptor& query);

// Argmax of CC. Values within 1e-12 of the maximum count as ties and the
// smallest shift wins, so FFT rounding cannot break exact symmetries.
int BestRotation(const Eigen::VectorXd& cc);

// Circularly shifts columns so that query sector (s + shift) mod S lands on
// map sector s.
template <typename Derived>
typename Derived::PlainObject ShiftColumns(const Eigen::DenseBase<Derived>& g,
                                           int shift) {
  const Eigen::Index cols = g.cols();
  const Eigen::Index k = ((shift % cols) + cols) % cols;
  typename Derived::PlainObject out(g.rows(), cols);
  out.leftCols(cols - k) = g.rightCols(cols - k);
  out.rightCols(k) = g.leftCols(k);
  return out;
}

struct AlignedBernoulli {
  Grid mu;
  Grid sigma;
};

AlignedBernoulli AlignQuery(const Descriptor& query, int delta_star);

// Pulls mu toward 0.5 by its own uncertainty, p = mu (1 - sigma) + sigma / 2,
// then clamps to [eps, 1 - eps].
template <typename Scalar>
Scalar Shrink(Scalar mu, Scalar sigma, Scalar eps) {
  const Scalar p = mu * (Scalar(1) - sigma) + Scalar(0.5) * sigma;
  return std::clamp(p, eps, Scalar(1) - eps);
}

// Symmetric KL divergence between Bernoulli(p) and Bernoulli(q),
//   (KL(p||q) + KL(q||p)) / 2 = (p - q)(logit p - logit q) / 2.
// The product form is exactly symmetric and never negative.
template <typename Scalar>
Scalar SymmetricKl(Scalar p, Scalar q) {
  const Scalar logit_p = std::log(p) - std::log1p(-p);
  const Scalar logit_q = std::log(q) - std::log1p(-q);
  return Scalar(0.5) * (p - q) * (logit_p - logit_q);
}

struct KlJaccard {
  double value = 0.0;
  Eigen::Index union_cells = 0;
};

// exp(-mean symmetric KL of shrunk cells) over the soft union
// {mu_m + mu_q > eps_union}. Throws kEmptyUnion when that set is empty and
// kShapeMismatch on differing shapes.
KlJaccard BernoulliKlJaccard(const Grid& mu_map, const Grid& sigma_map,
                             const Grid& mu_query, const Grid& sigma_query,
                             const PolarConfig& cfg);

// Rotation via CC, cosine at the best shift, Bernoulli-KL Jaccard on the
// aligned maps, fused according to `mode`. Empty unions score distance 1
// with empty_union set. Throws kShapeMismatch or kDegenerate.
MatchScore ScorePair(const Descriptor& map, const Descriptor& query,
                     ScoreMode mode = ScoreMode::kFused);

}  // namespace bbev

#endif  // BBEV_MATCHING_H_
