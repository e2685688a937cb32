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

#include "bbev/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "bbev/errors.h"
#include "bbev/matching.h"
#include "bbev/parallel.h"

namespace bbev {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Structure RandomStructure(std::mt19937_64& rng, const SceneSpec& spec,
                          const Eigen::Vector2d& center) {
  std::uniform_real_distribution<double> size(spec.min_size, spec.max_size);
  std::uniform_real_distribution<double> height(spec.min_height,
                                                spec.max_height);
  std::bernoulli_distribution coin(0.5);
  Structure s;
  s.center = center;
  s.archetype = coin(rng) ? Archetype::kBox : Archetype::kCylinder;
  s.half_extent << size(rng), size(rng);
  s.radius = size(rng);
  s.height = height(rng);
  return s;
}

// Radius of a circle around the center that covers the footprint.
double FootprintRadius(const Structure& s) {
  return s.archetype == Archetype::kBox ? s.half_extent.norm() : s.radius;
}

Eigen::Vector3d SurfacePoint(const Structure& s, std::mt19937_64& rng,
                             double sensor_height) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::Vector2d xy;
  if (s.archetype == Archetype::kCylinder) {
    const double a = kTwoPi * unit(rng);
    xy = s.center + s.radius * Eigen::Vector2d(std::cos(a), std::sin(a));
  } else {
    const double hx = s.half_extent.x();
    const double hy = s.half_extent.y();
    double t = unit(rng) * 4.0 * (hx + hy);
    if (t < 2.0 * hx) {
      xy << -hx + t, -hy;
    } else if ((t -= 2.0 * hx) < 2.0 * hy) {
      xy << hx, -hy + t;
    } else if ((t -= 2.0 * hy) < 2.0 * hx) {
      xy << hx - t, hy;
    } else {
      t -= 2.0 * hx;
      xy << -hx, hy - t;
    }
    xy += s.center;
  }
  const double z = -sensor_height + s.height * unit(rng);
  return {xy.x(), xy.y(), z};
}

// Distance from p to the boundary of the axis-aligned square [0, side]^2.
double DistanceToSquarePath(const Eigen::Vector2d& p, double side) {
  const bool inside = p.x() >= 0 && p.x() <= side && p.y() >= 0 &&
                      p.y() <= side;
  if (inside) {
    return std::min({p.x(), side - p.x(), p.y(), side - p.y()});
  }
  const double dx = std::max({-p.x(), 0.0, p.x() - side});
  const double dy = std::max({-p.y(), 0.0, p.y() - side});
  return std::hypot(dx, dy);
}

struct PathPose {
  Eigen::Vector2d position;
  Eigen::Vector2d heading;
};

// Counter-clockwise around [0, side]^2 starting at the origin.
PathPose PoseOnSquare(double arc, double side) {
  const double perimeter = 4.0 * side;
  arc = std::fmod(std::fmod(arc, perimeter) + perimeter, perimeter);
  const int edge = std::min(static_cast<int>(arc / side), 3);
  const double t = arc - edge * side;
  switch (edge) {
    case 0:
      return {{t, 0.0}, {1.0, 0.0}};
    case 1:
      return {{side, t}, {0.0, 1.0}};
    case 2:
      return {{side - t, side}, {-1.0, 0.0}};
    default:
      return {{0.0, side - t}, {0.0, -1.0}};
  }
}

// Distance along the unit ray origin + t * dir to the first footprint
// boundary of `s`, or infinity. Rays starting inside a footprint report 0.
double RayHit(const Structure& s, const Eigen::Vector2d& origin,
              const Eigen::Vector2d& dir) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Eigen::Vector2d o = origin - s.center;
  if (s.archetype == Archetype::kCylinder) {
    const double b = o.dot(dir);
    const double cc = o.squaredNorm() - s.radius * s.radius;
    if (cc <= 0.0) return 0.0;
    const double disc = b * b - cc;
    if (disc < 0.0) return kInf;
    const double t = -b - std::sqrt(disc);
    return t >= 0.0 ? t : kInf;
  }
  // Slab test against the axis-aligned box.
  double t_near = -kInf;
  double t_far = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    const double h = s.half_extent(axis);
    if (dir(axis) == 0.0) {
      if (std::abs(o(axis)) > h) return kInf;
      continue;
    }
    double t0 = (-h - o(axis)) / dir(axis);
    double t1 = (h - o(axis)) / dir(axis);
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  if (t_near > t_far || t_far < 0.0) return kInf;
  return std::max(t_near, 0.0);
}

}  // namespace

std::vector<Structure> GenerateStructures(const SceneSpec& spec) {
  std::mt19937_64 rng(MixSeed(spec.seed, 0));
  std::uniform_real_distribution<double> coord(-0.5 * spec.area,
                                               0.5 * spec.area);
  std::vector<Structure> structures;
  structures.reserve(static_cast<std::size_t>(std::max(spec.n_structures, 0)));
  while (static_cast<int>(structures.size()) < spec.n_structures) {
    const Eigen::Vector2d center(coord(rng), coord(rng));
    Structure s = RandomStructure(rng, spec, center);
    if (center.norm() - FootprintRadius(s) < spec.clear_radius) continue;
    structures.push_back(s);
  }
  return structures;
}

PointCloud SampleScan(const std::vector<Structure>& world,
                      const Eigen::Vector3d& sensor_pose,
                      const SceneSpec& spec, std::uint64_t seed,
                      double max_range) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Vector2d origin = sensor_pose.head<2>();
  const double yaw = sensor_pose.z();
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);

  std::vector<const Structure*> visible;
  for (const Structure& st : world) {
    if ((st.center - origin).norm() - FootprintRadius(st) < max_range) {
      visible.push_back(&st);
    }
  }

  // Nearest structure hit per world-frame azimuth bin.
  const int bins = spec.occlusion ? std::max(spec.occlusion_bins, 1) : 0;
  std::vector<double> first_hit(static_cast<std::size_t>(bins),
                                std::numeric_limits<double>::infinity());
  for (int b = 0; b < bins; ++b) {
    const double a = (b + 0.5) * kTwoPi / bins;
    const Eigen::Vector2d dir(std::cos(a), std::sin(a));
    for (const Structure* st : visible) {
      first_hit[b] = std::min(first_hit[b], RayHit(*st, origin, dir));
    }
  }
  // Tolerance for surface noise and the azimuth quantization of the bins.
  constexpr double kOcclusionSlack = 0.5;
  auto occluded = [&](const Eigen::Vector2d& world_xy) {
    if (bins == 0) return false;
    const Eigen::Vector2d d = world_xy - origin;
    double a = std::atan2(d.y(), d.x());
    if (a < 0.0) a += kTwoPi;
    const int b = std::min(static_cast<int>(a / kTwoPi * bins), bins - 1);
    return d.norm() > first_hit[b] + kOcclusionSlack;
  };

  std::vector<Eigen::Vector3d> kept;
  auto keep = [&](const Eigen::Vector3d& world_point) {
    if (occluded(world_point.head<2>())) return;
    const double dx = world_point.x() - origin.x();
    const double dy = world_point.y() - origin.y();
    const Eigen::Vector3d local(c * dx + s * dy, -s * dx + c * dy,
                                world_point.z());
    if (std::hypot(local.x(), local.y()) < max_range) kept.push_back(local);
  };

  for (const Structure* st : visible) {
    for (int k = 0; k < spec.points_per_structure; ++k) {
      Eigen::Vector3d p = SurfacePoint(*st, rng, spec.sensor_height);
      p.x() += spec.noise_std * noise(rng);
      p.y() += spec.noise_std * noise(rng);
      p.z() += spec.noise_std * noise(rng);
      keep(p);
    }
  }

  constexpr double kDeg = std::numbers::pi / 180.0;
  for (int beam = 0; beam < spec.ground_beams; ++beam) {
    const double t = spec.ground_beams > 1
                         ? static_cast<double>(beam) / (spec.ground_beams - 1)
                         : 0.0;
    const double elevation =
        kDeg * (spec.min_beam_elevation_deg +
                t * (spec.max_beam_elevation_deg - spec.min_beam_elevation_deg));
    if (elevation >= 0.0) continue;
    const double range = spec.sensor_height / std::tan(-elevation);
    if (range >= max_range) continue;
    for (int k = 0; k < spec.ground_points_per_beam; ++k) {
      const double a = kTwoPi * (k + unit(rng)) / spec.ground_points_per_beam;
      const double r = range + spec.noise_std * noise(rng);
      keep({origin.x() + r * std::cos(a), origin.y() + r * std::sin(a),
            -spec.sensor_height + spec.noise_std * noise(rng)});
    }
  }

  PointCloud cloud;
  cloud.xyz.resize(3, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    cloud.xyz.col(static_cast<Eigen::Index>(i)) = kept[i];
  }
  return cloud;
}

SceneSpec LidarLikeScene() {
  SceneSpec spec;
  spec.n_structures = 160;
  spec.ground_beams = 48;
  spec.occlusion = true;
  return spec;
}

PointCloud GenerateScene(const SceneSpec& spec) {
  if (spec.n_structures <= 0) return {};
  return SampleScan(GenerateStructures(spec), Eigen::Vector3d::Zero(), spec,
                    MixSeed(spec.seed, 1),
                    std::numeric_limits<double>::infinity());
}

PointCloud TransformCloud(const PointCloud& cloud, double yaw,
                          const Eigen::Vector2d& translation) {
  PointCloud out = cloud;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const double x = cloud.xyz(0, i);
    const double y = cloud.xyz(1, i);
    out.xyz(0, i) = c * x - s * y + translation.x();
    out.xyz(1, i) = s * x + c * y + translation.y();
  }
  return out;
}

SyntheticSequence GenerateLoop(const LoopSpec& spec, double max_range) {
  const SceneSpec& scene = spec.scene;
  std::mt19937_64 rng(MixSeed(scene.seed, 2));
  std::uniform_real_distribution<double> coord(-spec.margin,
                                               spec.side + spec.margin);
  const double keep_out = spec.corridor + std::abs(spec.lateral_offset);
  std::vector<Structure> world;
  while (static_cast<int>(world.size()) < scene.n_structures) {
    const Eigen::Vector2d center(coord(rng), coord(rng));
    Structure s = RandomStructure(rng, scene, center);
    if (DistanceToSquarePath(center, spec.side) - FootprintRadius(s) <
        keep_out) {
      continue;
    }
    world.push_back(s);
  }

  std::uniform_real_distribution<double> yaw_jitter(-spec.yaw_noise,
                                                    spec.yaw_noise);
  const int per_pass =
      static_cast<int>(std::floor(4.0 * spec.side / spec.spacing));
  SyntheticSequence seq;
  for (int pass = 0; pass < spec.passes; ++pass) {
    const double lateral = pass == 0 ? 0.0 : spec.lateral_offset;
    const double along = pass == 0 ? 0.0 : spec.along_offset;
    for (int k = 0; k < per_pass; ++k) {
      const PathPose pose = PoseOnSquare(k * spec.spacing + along, spec.side);
      const Eigen::Vector2d left(-pose.heading.y(), pose.heading.x());
      const Eigen::Vector2d xy = pose.position + lateral * left;
      double yaw = std::atan2(pose.heading.y(), pose.heading.x());
      if (spec.yaw_noise > 0.0) yaw += yaw_jitter(rng);

      Frame frame;
      frame.frame_id = static_cast<std::int64_t>(seq.trajectory.size());
      frame.position << xy.x(), xy.y(), 0.0;
      frame.yaw = yaw;
      seq.trajectory.frames.push_back(frame);
      seq.scans.push_back(SampleScan(
          world, {xy.x(), xy.y(), yaw}, scene,
          MixSeed(scene.seed, 1000 + static_cast<std::uint64_t>(frame.frame_id)),
          max_range));
    }
  }
  return seq;
}

MonteCarloEstimate MonteCarloMu(const Occupancy& occupancy,
                                const PolarConfig& cfg, int n_samples,
                                std::uint64_t seed, TangentialSpread spread) {
  if (n_samples < 1) {
    throw Error(ErrorKind::kInvalidParameter, "n_samples must be >= 1");
  }
  const Eigen::Index rings = occupancy.rows();
  const Eigen::Index sectors = occupancy.cols();
  const double ring_width = cfg.max_range / static_cast<double>(rings);
  const double sector_width = kTwoPi / static_cast<double>(sectors);

  std::vector<double> tangential(static_cast<std::size_t>(rings));
  for (Eigen::Index r = 0; r < rings; ++r) {
    int occupied = 0;
    for (Eigen::Index s = 0; s < sectors; ++s) occupied += occupancy(r, s);
    const double rho = static_cast<double>(occupied) / sectors;
    tangential[r] = spread == TangentialSpread::kIsotropic
                        ? cfg.sigma_t
                        : cfg.sigma_t * std::sqrt(rho);
  }
  std::vector<double> cos_c(static_cast<std::size_t>(sectors));
  std::vector<double> sin_c(static_cast<std::size_t>(sectors));
  for (Eigen::Index s = 0; s < sectors; ++s) {
    const double theta = (s + 0.5) * sector_width;
    cos_c[s] = std::cos(theta);
    sin_c[s] = std::sin(theta);
  }

  Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(rings, sectors);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int n = 0; n < n_samples; ++n) {
    const double radial_draw = cfg.sigma_t * normal(rng);
    const double tangent_draw = normal(rng);
    for (Eigen::Index r = 0; r < rings; ++r) {
      const double r_center = (r + 0.5) * ring_width;
      const double along = r_center + radial_draw;
      Eigen::Index spread_ring = r;
      if (spread == TangentialSpread::kLandingRing) {
        spread_ring = std::clamp<Eigen::Index>(
            static_cast<Eigen::Index>(std::floor(along / ring_width)), 0,
            rings - 1);
      }
      const double across = tangential[spread_ring] * tangent_draw;
      for (Eigen::Index s = 0; s < sectors; ++s) {
        const double x = along * cos_c[s] - across * sin_c[s];
        const double y = along * sin_c[s] + across * cos_c[s];
        const double range = std::hypot(x, y);
        if (!(range < cfg.max_range)) continue;
        double theta = std::atan2(y, x);
        if (theta < 0.0) theta += kTwoPi;
        const auto ring = std::min<Eigen::Index>(
            static_cast<Eigen::Index>(range / ring_width), rings - 1);
        auto sector = static_cast<Eigen::Index>(theta / sector_width);
        if (sector >= sectors) sector = 0;
        hits(r, s) += occupancy(ring, sector);
      }
    }
  }

  MonteCarloEstimate estimate;
  estimate.mu = hits / static_cast<double>(n_samples);
  estimate.std_error =
      (estimate.mu.array() * (1.0 - estimate.mu.array()) /
       static_cast<double>(n_samples))
          .sqrt();
  return estimate;
}

Eigen::VectorXd BruteForceCc(const Grid& map_height,
                             const Grid& query_height) {
  if (map_height.rows() != query_height.rows() ||
      map_height.cols() != query_height.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "brute-force CC shape mismatch");
  }
  const Eigen::Index rings = map_height.rows();
  const Eigen::Index sectors = map_height.cols();
  double norm_m = 0.0;
  double norm_q = 0.0;
  for (Eigen::Index r = 0; r < rings; ++r) {
    for (Eigen::Index s = 0; s < sectors; ++s) {
      norm_m += map_height(r, s) * map_height(r, s);
      norm_q += query_height(r, s) * query_height(r, s);
    }
  }
  if (norm_m == 0.0 || norm_q == 0.0) {
    throw Error(ErrorKind::kDegenerate, "brute-force CC of a zero grid");
  }
  const double norm = std::sqrt(norm_m) * std::sqrt(norm_q);
  Eigen::VectorXd cc(sectors);
  for (Eigen::Index d = 0; d < sectors; ++d) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < rings; ++r) {
      for (Eigen::Index s = 0; s < sectors; ++s) {
        acc += map_height(r, s) * query_height(r, (s + d) % sectors);
      }
    }
    cc(d) = acc / norm;
  }
  return cc;
}

std::vector<RobustnessRow> RobustnessSweep(
    const SceneSpec& scene, const std::vector<double>& offsets,
    const std::vector<double>& sigma_t_values, const PolarConfig& base,
    int frames, int jobs) {
  if (frames < 1) {
    throw Error(ErrorKind::kInvalidParameter, "frames must be >= 1");
  }
  constexpr int kDirections = 3;
  const std::size_t n_offsets = offsets.size();
  const std::size_t n_sigmas = sigma_t_values.size();
  // samples[(o * n_sigmas + k) * frames * 3 + f * 3 + dir]
  std::vector<double> samples(n_offsets * n_sigmas * frames * kDirections);

  ParallelFor(static_cast<std::size_t>(frames), jobs, [&](std::size_t f) {
    SceneSpec frame_scene = scene;
    frame_scene.seed = scene.seed + f;
    const PointCloud cloud = GenerateScene(frame_scene);
    for (std::size_t k = 0; k < n_sigmas; ++k) {
      PolarConfig cfg = base;
      cfg.sigma_t = sigma_t_values[k];
      const Descriptor reference = MakeDescriptor(cloud, cfg);
      for (std::size_t o = 0; o < n_offsets; ++o) {
        for (int dir = 0; dir < kDirections; ++dir) {
          const double angle = dir * kTwoPi / kDirections;
          const Eigen::Vector2d shift =
              offsets[o] * Eigen::Vector2d(std::cos(angle), std::sin(angle));
          const Descriptor moved =
              MakeDescriptor(TransformCloud(cloud, 0.0, shift), cfg);
          const KlJaccard j =
              BernoulliKlJaccard(reference.mu(), reference.sigma(), moved.mu(),
                                 moved.sigma(), cfg);
          samples[((o * n_sigmas + k) * frames + f) * kDirections + dir] =
              j.value;
        }
      }
    }
  });

  std::vector<RobustnessRow> rows;
  const std::size_t per_cell = static_cast<std::size_t>(frames) * kDirections;
  for (std::size_t o = 0; o < n_offsets; ++o) {
    for (std::size_t k = 0; k < n_sigmas; ++k) {
      const auto first =
          samples.begin() + static_cast<long>((o * n_sigmas + k) * per_cell);
      const Eigen::Map<const Eigen::VectorXd> v(&*first,
                                                static_cast<long>(per_cell));
      RobustnessRow row;
      row.offset = offsets[o];
      row.sigma_t = sigma_t_values[k];
      row.mean_jkl = v.mean();
      row.std_jkl = per_cell > 1
                        ? std::sqrt((v.array() - row.mean_jkl).square().sum() /
                                    static_cast<double>(per_cell - 1))
                        : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace bbev
