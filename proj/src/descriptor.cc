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

#include "bbev/descriptor.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bbev/errors.h"
#include "fft.h"

namespace bbev {

std::optional<CellIndex> PolarCell(double x, double y,
                                   const PolarConfig& cfg) {
  const double range = std::sqrt(x * x + y * y);
  if (!(range < cfg.max_range)) return std::nullopt;

  double theta = std::atan2(y, x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;

  CellIndex cell;
  cell.ring = std::min(static_cast<int>(range / cfg.ring_width()),
                       cfg.rings - 1);
  cell.sector = static_cast<int>(std::floor(theta / cfg.sector_width()));
  if (cell.sector >= cfg.sectors) cell.sector = 0;
  return cell;
}

PolarGrid BuildPolarGrid(const PointCloud& cloud, const PolarConfig& cfg) {
  cfg.Validate();
  if (cloud.empty()) {
    throw Error(ErrorKind::kEmptyCloud, "cannot build a grid from no points");
  }
  PolarGrid grid;
  grid.height = Grid::Zero(cfg.rings, cfg.sectors);
  grid.occupancy = Occupancy::Zero(cfg.rings, cfg.sectors);

  Eigen::Index binned = 0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const auto cell = PolarCell(cloud.xyz(0, i), cloud.xyz(1, i), cfg);
    if (!cell) continue;
    const double h = std::max(cloud.xyz(2, i) + cfg.height_offset, 0.0);
    double& g = grid.height(cell->ring, cell->sector);
    g = std::max(g, h);
    grid.occupancy(cell->ring, cell->sector) = 1;
    ++binned;
  }
  if (binned == 0) {
    throw Error(ErrorKind::kEmptyDescriptor,
                "no point lies within max_range " +
                    std::to_string(cfg.max_range) + " m");
  }
  return grid;
}

Eigen::VectorXd RingDensity(const Occupancy& occupancy) {
  return occupancy.cast<double>().rowwise().mean();
}

double AngularKernelWidth(int ring, double density, const PolarConfig& cfg) {
  const double r_center = (ring + 0.5) * cfg.ring_width();
  const double sigma_eff = cfg.sigma_t * std::sqrt(density);
  return std::min(sigma_eff / (r_center * cfg.sector_width()),
                  cfg.theta_cap());
}

template <typename Scalar>
std::vector<Scalar> GaussianKernel(Scalar sigma, Scalar truncation) {
  if (!(sigma > Scalar(0))) return {Scalar(1)};
  const int radius = static_cast<int>(std::ceil(truncation * sigma));
  const Scalar scale = Scalar(1) / (sigma * std::numbers::sqrt2_v<Scalar>);
  // Cumulative mass via erfc keeps precision in the tails.
  auto cdf = [scale](Scalar x) {
    return Scalar(0.5) * std::erfc(-x * scale);
  };
  std::vector<Scalar> taps(2 * radius + 1);
  Scalar total = 0;
  for (int k = -radius; k <= radius; ++k) {
    const Scalar lo = Scalar(k) - Scalar(0.5);
    const Scalar hi = Scalar(k) + Scalar(0.5);
    // Evaluate on the left half and mirror so the kernel is exactly even.
    const Scalar w = k <= 0 ? cdf(hi) - cdf(lo) : taps[radius - k];
    taps[k + radius] = w;
    total += w;
  }
  for (Scalar& w : taps) w /= total;
  return taps;
}

template std::vector<float> GaussianKernel<float>(float, float);
template std::vector<double> GaussianKernel<double>(double, double);

Grid BlurAngular(const Occupancy& occupancy, const PolarConfig& cfg) {
  const Eigen::Index rings = occupancy.rows();
  const Eigen::Index sectors = occupancy.cols();
  const Eigen::VectorXd density = RingDensity(occupancy);
  Grid out(rings, sectors);
  for (Eigen::Index r = 0; r < rings; ++r) {
    const auto taps = GaussianKernel(
        AngularKernelWidth(static_cast<int>(r), density(r), cfg),
        cfg.kernel_truncation);
    const auto radius = static_cast<Eigen::Index>(taps.size() / 2);
    for (Eigen::Index s = 0; s < sectors; ++s) {
      double acc = 0.0;
      for (Eigen::Index k = -radius; k <= radius; ++k) {
        const Eigen::Index src = ((s + k) % sectors + sectors) % sectors;
        acc += taps[k + radius] * occupancy(r, src);
      }
      out(r, s) = acc;
    }
  }
  return out;
}

Grid BlurRadial(const Grid& grid, double sigma_cells, double truncation) {
  const Eigen::Index rings = grid.rows();
  const auto taps = GaussianKernel(sigma_cells, truncation);
  const auto radius = static_cast<Eigen::Index>(taps.size() / 2);
  Grid out = Grid::Zero(rings, grid.cols());
  for (Eigen::Index r = 0; r < rings; ++r) {
    const Eigen::Index lo = std::max<Eigen::Index>(-radius, -r);
    const Eigen::Index hi = std::min<Eigen::Index>(radius, rings - 1 - r);
    for (Eigen::Index k = lo; k <= hi; ++k) {
      out.row(r) += taps[k + radius] * grid.row(r + k);
    }
  }
  return out;
}

Grid MarginalizeOccupancy(const Occupancy& occupancy, const PolarConfig& cfg) {
  Grid mu = BlurRadial(BlurAngular(occupancy, cfg), cfg.radial_sigma(),
                       cfg.kernel_truncation);
  return mu.cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

// Summing in sorted order makes the mean independent of column order, so
// circular shifts leave it bit-identical.
Eigen::VectorXd RowMeans(const Grid& grid) {
  Eigen::VectorXd means(grid.rows());
  std::vector<double> row(static_cast<std::size_t>(grid.cols()));
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), grid.cols()) = grid.row(r);
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += v;
    means(r) = sum / static_cast<double>(grid.cols());
  }
  return means;
}

}  // namespace

Eigen::VectorXd RingKey(const Grid& height, const Grid& mu) {
  Eigen::VectorXd key(height.rows() + mu.rows());
  key << RowMeans(height), RowMeans(mu);
  return key;
}

SpectrumGrid RowSpectra(const Grid& grid) {
  auto& fft = internal::ThreadFft();
  SpectrumGrid spectra(grid.rows(), grid.cols());
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    fft.fwd(spectra.row(r).data(), grid.row(r).data(), grid.cols());
  }
  return spectra;
}

Descriptor::Descriptor(Grid height, Occupancy occupancy, Grid mu, Grid sigma,
                       Eigen::VectorXd key, PolarConfig config)
    : height_(std::move(height)),
      occupancy_(std::move(occupancy)),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      key_(std::move(key)),
      config_(std::move(config)) {
  const auto same_shape = [this](auto const& g) {
    return g.rows() == height_.rows() && g.cols() == height_.cols();
  };
  if (!same_shape(occupancy_) || !same_shape(mu_) || !same_shape(sigma_) ||
      key_.size() != 2 * height_.rows() || height_.rows() != config_.rings ||
      height_.cols() != config_.sectors) {
    throw Error(ErrorKind::kShapeMismatch,
                "descriptor parts disagree on the grid shape");
  }
  row_spectra_ = RowSpectra(height_);
  frobenius_norm_ = height_.norm();
}

Descriptor MakeDescriptor(const PointCloud& cloud, const PolarConfig& cfg) {
  cfg.Validate();
  if (cloud.empty()) {
    throw Error(ErrorKind::kEmptyCloud, "cannot describe an empty cloud");
  }
  PolarGrid grid = cfg.voxel > 0.0
                       ? BuildPolarGrid(VoxelDownsample(cloud, cfg.voxel), cfg)
                       : BuildPolarGrid(cloud, cfg);
  Grid mu = MarginalizeOccupancy(grid.occupancy, cfg);
  Grid sigma = BernoulliSigma(mu);
  Eigen::VectorXd key = RingKey(grid.height, mu);
  return Descriptor(std::move(grid.height), std::move(grid.occupancy),
                    std::move(mu), std::move(sigma), std::move(key), cfg);
}

void CheckDescriptorInvariants(const Descriptor& d, double tolerance) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kInvalidParameter, "descriptor invariant: " + what);
  };
  if ((d.occupancy().array() > 1).any()) fail("occupancy not binary");
  if ((d.height().array() < 0.0).any()) fail("negative height");
  if ((d.height().array() > 0.0 && d.occupancy().array() == 0).any()) {
    fail("height on an unoccupied cell");
  }
  if ((d.mu().array() < 0.0).any() || (d.mu().array() > 1.0).any()) {
    fail("mu outside [0, 1]");
  }
  if ((d.sigma() - BernoulliSigma(d.mu())).cwiseAbs().maxCoeff() > tolerance) {
    fail("sigma != sqrt(mu (1 - mu))");
  }
  if ((d.sigma().array() > 0.5).any()) fail("sigma above 0.5");
  if ((d.key() - RingKey(d.height(), d.mu())).cwiseAbs().maxCoeff() >
      tolerance) {
    fail("key != ring means");
  }
  auto& fft = internal::ThreadFft();
  Eigen::VectorXd row(d.sectors());
  for (Eigen::Index r = 0; r < d.rings(); ++r) {
    fft.inv(row.data(), d.row_spectra().row(r).data(), d.sectors());
    const double scale = std::max(1.0, d.height().row(r).cwiseAbs().maxCoeff());
    if ((row.transpose() - d.height().row(r)).cwiseAbs().maxCoeff() >
        1e-9 * scale) {
      fail("row spectrum does not invert to the height row");
    }
  }
}

}  // namespace bbev
