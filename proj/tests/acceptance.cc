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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Each criterion also has a wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bbev/descriptor.h"
#include "bbev/eval.h"
#include "bbev/kdtree.h"
#include "bbev/matching.h"
#include "bbev/parallel.h"
#include "bbev/retrieval.h"
#include "bbev/synth.h"

namespace bbev {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int Jobs() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

PointCloud RandomCloud(int n, std::uint64_t seed, double extent = 60.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-extent, extent), z(-2.0, 8.0);
  PointCloud c;
  c.xyz.resize(3, n);
  for (int i = 0; i < n; ++i) c.xyz.col(i) << xy(rng), xy(rng), z(rng);
  return c;
}

Descriptor SceneDescriptor(std::uint64_t seed, const PolarConfig& cfg) {
  SceneSpec spec;
  spec.seed = seed;
  return MakeDescriptor(GenerateScene(spec), cfg);
}

Outcome A1() {
  PolarConfig cfg;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Descriptor a = SceneDescriptor(1000 + 2 * i, cfg);
    const Descriptor b = SceneDescriptor(1001 + 2 * i, cfg);
    const Eigen::VectorXd fft = CircularCrossCorrelation(a, b);
    const Eigen::VectorXd brute = BruteForceCc(a.height(), b.height());
    worst = std::max(worst, (fft - brute).cwiseAbs().maxCoeff());
  }
  std::ostringstream s;
  s << "max |FFT - brute| over 50 pairs x 60 shifts = " << worst;
  return {worst < 1e-6, s.str()};
}

Outcome A2() {
  PolarConfig cfg;  // sigma_t = 2
  constexpr int kFirstRing = 5;  // ring centers at >= 10 m
  double worst = 0.0;
  double worst_isotropic = 0.0;
  std::mt19937_64 rng(2024);
  std::bernoulli_distribution occupied(0.3);
  for (int g = 0; g < 5; ++g) {
    Occupancy o(cfg.rings, cfg.sectors);
    for (Eigen::Index i = 0; i < o.size(); ++i) o.data()[i] = occupied(rng);
    const Grid mu = MarginalizeOccupancy(o, cfg);
    const int rows = cfg.rings - kFirstRing;
    const auto mc = MonteCarloMu(o, cfg, 20000, 77 + g);
    worst = std::max(worst, (mu.bottomRows(rows) - mc.mu.bottomRows(rows))
                                .cwiseAbs()
                                .maxCoeff());
    if (g == 0) {
      const auto iso =
          MonteCarloMu(o, cfg, 20000, 99, TangentialSpread::kIsotropic);
      worst_isotropic = (mu.bottomRows(rows) - iso.mu.bottomRows(rows))
                            .cwiseAbs()
                            .maxCoeff();
    }
  }
  std::ostringstream s;
  s << "max |mu - MC| on rings >= 10 m over 5 grids = " << worst
    << " (isotropic-spread MC, grid 0, for reference: " << worst_isotropic
    << ")";
  return {worst <= 0.05, s.str()};
}

Outcome A3() {
  const std::vector<double> offsets = {0, 1, 2, 3, 4};
  const std::vector<double> sigmas = {0, 2, 4};
  const auto rows =
      RobustnessSweep(SceneSpec{}, offsets, sigmas, PolarConfig{}, 7, Jobs());
  bool pass = true;
  std::ostringstream s;
  s << "J_KL by offset (sigma_t 0/2/4):";
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    const double j0 = rows[3 * o].mean_jkl;
    const double j2 = rows[3 * o + 1].mean_jkl;
    const double j4 = rows[3 * o + 2].mean_jkl;
    s << " " << offsets[o] << "m=" << j0 << "/" << j2 << "/" << j4;
    if (offsets[o] == 0.0) {
      for (double j : {j0, j2, j4}) pass &= std::abs(j - 1.0) <= 1e-9;
    } else {
      pass &= j0 <= j2 && j2 <= j4;
    }
  }
  return {pass, s.str()};
}

Outcome A4() {
  bool pass = true;
  std::ostringstream s;
  s << "lateral 3 m, along 2 m, yaw noise 0.05 rad; AUC sigma_t=0 | "
       "sigma_t=2 C1 C2 C3:";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    LoopSpec spec;
    spec.scene.seed = seed;
    spec.lateral_offset = 3.0;
    spec.along_offset = 2.0;
    spec.yaw_noise = 0.05;
    const SyntheticSequence seq = GenerateLoop(spec);

    auto describe = [&](double sigma_t) {
      PolarConfig cfg;
      cfg.sigma_t = sigma_t;
      std::vector<std::optional<Descriptor>> slots(seq.scans.size());
      ParallelFor(seq.scans.size(), Jobs(), [&](std::size_t i) {
        slots[i] = MakeDescriptor(seq.scans[i], cfg);
      });
      std::vector<Descriptor> out;
      for (auto& d : slots) out.push_back(std::move(*d));
      return out;
    };
    EvalOptions options;
    options.jobs = Jobs();
    auto auc = [&](const std::vector<Descriptor>& ds, ScoreMode mode) {
      options.mode = mode;
      return OnlineEval(ds, seq.trajectory, options).summary.auc;
    };

    const auto plain = describe(0.0);
    const auto blurred = describe(2.0);
    const double a0 = auc(plain, ScoreMode::kFused);
    const double c1 = auc(blurred, ScoreMode::kCosine);
    const double c2 = auc(blurred, ScoreMode::kKl);
    const double c3 = auc(blurred, ScoreMode::kFused);
    pass &= c3 > a0;
    pass &= c3 >= std::max(c1, c2) - 0.02;
    s << " [seed " << seed << ": " << a0 << " | " << c1 << " " << c2 << " "
      << c3 << "]";
  }
  return {pass, s.str()};
}

Outcome A5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sigma_err = 0.0;
  bool kl_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const double mu = u(rng);
    Eigen::Array<double, 1, 1> m;
    m << mu;
    sigma_err = std::max(
        sigma_err, std::abs(BernoulliSigma(m)(0) - std::sqrt(mu * (1 - mu))));
    const double p = std::clamp(u(rng), 1e-6, 1 - 1e-6);
    const double q = std::clamp(u(rng), 1e-6, 1 - 1e-6);
    const double pq = SymmetricKl(p, q);
    kl_ok &= pq == SymmetricKl(q, p) && pq >= 0.0;
  }
  bool shrink_ok = Shrink(0.5, 0.5, 1e-6) == 0.5;
  for (double mu : {0.01, 0.3, 0.77, 0.99}) {
    shrink_ok &= Shrink(mu, 0.0, 1e-6) == mu;
  }
  // On real descriptor grids too.
  const Descriptor d = SceneDescriptor(5, PolarConfig{});
  const double grid_err =
      (d.sigma().array() - (d.mu().array() * (1 - d.mu().array())).sqrt())
          .abs()
          .maxCoeff();
  std::ostringstream s;
  s << "sigma error " << std::max(sigma_err, grid_err) << ", shrinkage "
    << (shrink_ok ? "ok" : "wrong") << ", symmetric KL on 1e4 pairs "
    << (kl_ok ? "symmetric and non-negative" : "violated");
  return {sigma_err <= 1e-12 && grid_err <= 1e-12 && shrink_ok && kl_ok,
          s.str()};
}

Outcome A6() {
  PolarConfig cfg;
  cfg.voxel = 0.0;  // a Cartesian voxel grid does not rotate with the cloud
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> sector(1, cfg.sectors - 1);
  double key_err = 0.0;
  double worst_distance = 0.0;
  int worst_sector_error = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SceneSpec spec;
    spec.seed = 600 + seed;
    spec.ground_beams = 16;
    const PointCloud cloud = GenerateScene(spec);
    const Descriptor base = MakeDescriptor(cloud, cfg);
    const int k = sector(rng);
    const Descriptor turned = MakeDescriptor(
        TransformCloud(cloud, k * cfg.sector_width(), Eigen::Vector2d::Zero()),
        cfg);
    key_err = std::max(key_err, (turned.key() - base.key()).cwiseAbs().maxCoeff());
    const MatchScore m = ScorePair(base, turned);
    worst_distance = std::max(worst_distance, m.distance);
    const int diff = std::abs(m.delta_star - k);
    worst_sector_error =
        std::max(worst_sector_error, std::min(diff, cfg.sectors - diff));
  }
  std::ostringstream s;
  s << "20 scenes: max key change " << key_err << ", max self-match distance "
    << worst_distance << ", max delta* error " << worst_sector_error
    << " sectors";
  return {key_err < 1e-9 && worst_distance <= 1e-6 && worst_sector_error <= 1,
          s.str()};
}

Outcome A7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_key = [&] {
    Eigen::VectorXd k(80);
    for (Eigen::Index i = 0; i < k.size(); ++i) k(i) = u(rng);
    return k;
  };
  std::vector<Eigen::VectorXd> keys(2000);
  std::vector<FrameId> ids(2000);
  for (int i = 0; i < 2000; ++i) {
    keys[i] = random_key();
    ids[i] = i;
  }
  const DescriptorIndex index(keys, ids);
  int mismatches = 0;
  for (int q = 0; q < 500; ++q) {
    const Eigen::VectorXd query = random_key();
    std::vector<Neighbor> scan;
    for (int i = 0; i < 2000; ++i) scan.push_back({i, (keys[i] - query).norm()});
    std::sort(scan.begin(), scan.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.distance != b.distance ? a.distance < b.distance
                                      : a.frame_id < b.frame_id;
    });
    const auto got = index.QueryTopK(query, kDefaultTopK);
    bool same = got.size() == static_cast<std::size_t>(kDefaultTopK);
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].frame_id == scan[i].frame_id;
    }
    mismatches += !same;
  }
  std::ostringstream s;
  s << "top-" << kDefaultTopK << " differs from linear scan on " << mismatches
    << " of 500 queries over 2000 keys";
  return {mismatches == 0, s.str()};
}

// Median wall time of `reps` calls.
double MedianSeconds(int reps, const std::function<void()>& f) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto start = Clock::now();
    f();
    t.push_back(Seconds(start));
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Outcome A8() {
  auto pair_time = [](int sectors) {
    PolarConfig cfg;
    cfg.sectors = sectors;
    const Descriptor a = SceneDescriptor(800, cfg);
    const Descriptor b = SceneDescriptor(801, cfg);
    ScorePair(a, b);  // warm up the FFT plan
    double sink = 0.0;
    const double t = MedianSeconds(9, [&] {
      for (int i = 0; i < 200; ++i) sink += ScorePair(a, b).distance;
    });
    return sink >= 0.0 ? t / 200 : 0.0;
  };
  const double t60 = pair_time(60);
  const double t120 = pair_time(120);

  PolarConfig cfg;
  const PointCloud small = RandomCloud(10000, 8);
  const PointCloud large = RandomCloud(100000, 9);
  MakeDescriptor(small, cfg);
  const double c_small = MedianSeconds(9, [&] { MakeDescriptor(small, cfg); });
  const double c_large = MedianSeconds(5, [&] { MakeDescriptor(large, cfg); });

  const double match_ratio = t120 / t60;
  const double build_ratio = c_large / c_small;
  std::ostringstream s;
  s << "pair time S=60 " << t60 * 1e6 << " us, S=120 " << t120 * 1e6
    << " us (ratio " << match_ratio << "); construction 1e4 pts "
    << c_small * 1e3 << " ms, 1e5 pts " << c_large * 1e3 << " ms (ratio "
    << build_ratio << ")";
  return {match_ratio < 2.6 && build_ratio < 13.0, s.str()};
}

struct Criterion {
  const char* id;
  double budget_s;
  Outcome (*run)();
};

}  // namespace
}  // namespace bbev

int main() {
  using namespace bbev;
  const Criterion criteria[] = {
      {"A1", 10, A1},  {"A2", 120, A2}, {"A3", 60, A3}, {"A4", 180, A4},
      {"A5", 5, A5},   {"A6", 30, A6},  {"A7", 10, A7}, {"A8", 120, A8},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double elapsed = Seconds(start);
    const bool in_time = elapsed < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %s  %s  [%.2f s of %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                o.detail.c_str(), elapsed, c.budget_s,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
