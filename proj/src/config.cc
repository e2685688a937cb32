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

#include "bbev/config.h"

#include <cmath>
#include <string>

#include "bbev/errors.h"

namespace bbev {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidParameter, "config: " + what);
}

}  // namespace

void PolarConfig::Validate() const {
  Require(rings >= 2, "rings must be >= 2");
  Require(sectors >= 2, "sectors must be >= 2");
  Require(std::isfinite(max_range) && max_range > 0.0,
          "max_range must be positive");
  Require(std::isfinite(sigma_t) && sigma_t >= 0.0,
          "sigma_t must be non-negative");
  Require(eps_bernoulli > 0.0 && eps_bernoulli < 0.5,
          "eps_bernoulli must lie in (0, 0.5)");
  Require(std::isfinite(eps_union) && eps_union > 0.0,
          "eps_union must be positive");
  Require(std::isfinite(voxel) && voxel >= 0.0,
          "voxel must be non-negative (0 disables downsampling)");
  Require(std::isfinite(height_offset), "height_offset must be finite");
  Require(std::isfinite(kernel_truncation) && kernel_truncation > 0.0,
          "kernel_truncation must be positive");
  Require(std::isfinite(theta_cap()) && theta_cap() > 0.0,
          "sigma_theta_cap must be positive");
}

bool operator==(const PolarConfig& a, const PolarConfig& b) {
  return a.rings == b.rings && a.sectors == b.sectors &&
         a.max_range == b.max_range && a.sigma_t == b.sigma_t &&
         a.eps_bernoulli == b.eps_bernoulli && a.eps_union == b.eps_union &&
         a.voxel == b.voxel && a.height_offset == b.height_offset &&
         a.kernel_truncation == b.kernel_truncation &&
         a.theta_cap() == b.theta_cap();
}

}  // namespace bbev
