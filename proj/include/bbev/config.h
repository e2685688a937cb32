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

#ifndef BBEV_CONFIG_H_
#define BBEV_CONFIG_H_

#include <numbers>
#include <optional>
#include <string>

namespace bbev {

// Grid, blur and scoring hyper-parameters. Defaults are the fixed values
// used for every experiment; all are overridable from the CLI.
struct PolarConfig {
  int rings = 40;
  int sectors = 60;
  double max_range = 80.0;       // m
  double sigma_t = 2.0;          // translation uncertainty, m
  double eps_bernoulli = 1e-6;   // shrunk probabilities live in [eps, 1-eps]
  double eps_union = 1e-3;       // soft-union threshold on mu_m + mu_q
  double voxel = 0.5;            // m; 0 disables downsampling
  double height_offset = 2.0;    // m, added to z before max-height binning
  double kernel_truncation = 4.0;  // kernel radius in multiples of sigma
  // Sector-cell cap on the angular kernel width; unset means sectors / 4.
  std::optional<double> sigma_theta_cap;

  double ring_width() const { return max_range / rings; }
  double sector_width() const {
    return 2.0 * std::numbers::pi / sectors;
  }
  double theta_cap() const {
    return sigma_theta_cap.value_or(sectors / 4.0);
  }
  // Ring-cell units.
  double radial_sigma() const { return sigma_t / ring_width(); }

  // Throws Error(kInvalidParameter) naming the offending field.
  void Validate() const;
};

bool operator==(const PolarConfig& a, const PolarConfig& b);

}  // namespace bbev

#endif  // BBEV_CONFIG_H_
