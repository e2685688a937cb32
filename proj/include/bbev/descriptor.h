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

#ifndef BBEV_DESCRIPTOR_H_
#define BBEV_DESCRIPTOR_H_

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "bbev/config.h"
#include "bbev/pointcloud.h"

namespace bbev {

// Polar grids are R x S, ring-major: row r is ring r, column s is sector s.
template <typename Scalar>
using GridT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
using Grid = GridT<double>;
using Occupancy = GridT<std::uint8_t>;
using SpectrumGrid = GridT<std::complex<double>>;

struct PolarGrid {
  Grid height;          // max of (z + height_offset) clamped at 0; 0 = empty
  Occupancy occupancy;  // 1 iff the cell received at least one point
};

struct CellIndex {
  int ring = 0;
  int sector = 0;
};

// Cell of a point, or nullopt when its horizontal range is >= max_range.
// Sector comes from atan2 mapped to [0, 2pi); an angle that rounds to 2pi
// wraps to sector 0.
std::optional<CellIndex> PolarCell(double x, double y, const PolarConfig& cfg);

// Throws kEmptyCloud for an empty cloud and kEmptyDescriptor when no point
// falls inside max_range.
PolarGrid BuildPolarGrid(const PointCloud& cloud, const PolarConfig& cfg);

// Per-ring fraction of occupied sectors.
Eigen::VectorXd RingDensity(const Occupancy& occupancy);

// Angular blur width in sector cells for ring `ring` with occupancy rate
// `density`: sigma_t * sqrt(density) / (r_center * dtheta), capped at
// cfg.theta_cap(). r_center is the ring's mid radius.
double AngularKernelWidth(int ring, double density, const PolarConfig& cfg);

// Discrete Gaussian whose taps are the probability mass of N(0, sigma^2)
// falling in each unit cell [k - 1/2, k + 1/2), truncated at
// ceil(truncation * sigma) and renormalized to unit sum. sigma == 0 gives
// the identity kernel {1}.
template <typename Scalar>
std::vector<Scalar> GaussianKernel(Scalar sigma, Scalar truncation);

// Step 1 of the marginalization: each ring blurred along the azimuth with a
// circular boundary and its own density-gated width.
Grid BlurAngular(const Occupancy& occupancy, const PolarConfig& cfg);

// Step 2: each sector blurred along the rings with zero padding outside
// [0, R).
Grid BlurRadial(const Grid& grid, double sigma_cells, double truncation);

// Expected occupancy under isotropic Cartesian translation noise
// N(0, sigma_t^2 I), as two 1-D passes on the polar grid. Output is clamped
// to [0, 1]. sigma_t == 0 reproduces the occupancy exactly.
Grid MarginalizeOccupancy(const Occupancy& occupancy, const PolarConfig& cfg);

// Bernoulli standard deviation sqrt(mu (1 - mu)), elementwise.
template <typename Derived>
typename Derived::PlainObject BernoulliSigma(
    const Eigen::DenseBase<Derived>& mu) {
  using Scalar = typename Derived::Scalar;
  typename Derived::PlainObject sigma(mu.rows(), mu.cols());
  sigma.array() =
      (mu.derived().array() * (Scalar(1) - mu.derived().array())).sqrt();
  return sigma;
}

// [row means of height || row means of mu], length 2R. Invariant to
// circular column shifts.
Eigen::VectorXd RingKey(const Grid& height, const Grid& mu);

// Row-wise DFT of a real grid.
SpectrumGrid RowSpectra(const Grid& grid);

// Immutable place descriptor. Row spectra and the Frobenius norm of the
// height grid are precomputed for matching.
class Descriptor {
 public:
  Descriptor(Grid height, Occupancy occupancy, Grid mu, Grid sigma,
             Eigen::VectorXd key, PolarConfig config);

  const Grid& height() const { return height_; }
  const Occupancy& occupancy() const { return occupancy_; }
  const Grid& mu() const { return mu_; }
  const Grid& sigma() const { return sigma_; }
  const Eigen::VectorXd& key() const { return key_; }
  const SpectrumGrid& row_spectra() const { return row_spectra_; }
  double frobenius_norm() const { return frobenius_norm_; }
  const PolarConfig& config() const { return config_; }

  int rings() const { return static_cast<int>(height_.rows()); }
  int sectors() const { return static_cast<int>(height_.cols()); }

 private:
  Grid height_;
  Occupancy occupancy_;
  Grid mu_;
  Grid sigma_;
  Eigen::VectorXd key_;
  SpectrumGrid row_spectra_;
  double frobenius_norm_ = 0.0;
  PolarConfig config_;
};

// Full pipeline: voxel downsample (skipped when cfg.voxel == 0), polar grid,
// marginalized occupancy, Bernoulli sigma, ring key, row spectra.
Descriptor MakeDescriptor(const PointCloud& cloud, const PolarConfig& cfg);

// Throws kInvalidParameter describing the first violated Descriptor
// invariant (binary occupancy, mu range, sigma identity, key, spectra).
void CheckDescriptorInvariants(const Descriptor& d, double tolerance = 1e-12);

}  // namespace bbev

#endif  // BBEV_DESCRIPTOR_H_
