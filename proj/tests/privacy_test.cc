// Copyright 2026 The Geomask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geomask/privacy.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.h"
#include "geomask/error.h"

namespace geomask {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::kIo;
}

TEST(BufferRadius, RayleighQuantile) {
  // 95% quantile of a Rayleigh(sigma) radius is sigma * sqrt(2 ln 20)
  EXPECT_NEAR(BufferRadius(100.0, 0.95), 100.0 * std::sqrt(2.0 * std::log(20.0)), 1e-9);
  EXPECT_NEAR(BufferRadius(1.0, 0.5), std::sqrt(2.0 * std::log(2.0)), 1e-12);
  // Monte Carlo oracle: the disk holds the true point with the stated probability
  Rng rng = SubstreamRng(1, 0);
  const double r = BufferRadius(50.0, 0.9);
  int inside = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    inside += GaussianSkew({0, 0}, 50.0, 0.0, rng).displacement.Norm() <= r;
  }
  EXPECT_NEAR(static_cast<double>(inside) / n, 0.9, 0.006);
  EXPECT_EQ(CodeOf([] { BufferRadius(1.0, 1.0); }), ErrorCode::kInvalidCoverage);
  EXPECT_EQ(CodeOf([] { BufferRadius(1.0, 0.0); }), ErrorCode::kInvalidCoverage);
}

TEST(BufferRadius, LaplaceQuantile) {
  for (double cov : {0.5, 0.9, 0.95, 0.99}) {
    const double r = LaplaceBufferRadius(0.01, cov);
    EXPECT_NEAR(PlanarLaplaceCdf(0.01, r), cov, 1e-10);
  }
  MaskedRecord m;
  m.mechanism = Mechanism::kPlanarLaplace;
  EXPECT_EQ(CodeOf([&] { BufferRadiusFor(m, 0.95); }), ErrorCode::kInvalidArgument);
  m.epsilon_per_m = 0.01;
  EXPECT_EQ(BufferRadiusFor(m, 0.95), LaplaceBufferRadius(0.01, 0.95));
}

TEST(KAnonymity, CountsHomesAndOriginal) {
  const LocalFrame f({42, -71});
  const auto homes = PointIndex::Build({{"a", f.Unproject({10, 0})},
                                        {"b", f.Unproject({0, 20})},
                                        {"c", f.Unproject({100, 0})}});
  const GeoPoint masked = f.Unproject({0, 0});
  auto r = KAnonymity(masked, std::nullopt, homes, 50);
  EXPECT_EQ(r.k, 2u);
  EXPECT_EQ(r.risk.numerator, 1u);
  EXPECT_EQ(r.risk.denominator, 2u);
  EXPECT_FALSE(r.includes_original);
  // original not a home, inside the disk
  r = KAnonymity(masked, f.Unproject({-30, 0}), homes, 50);
  EXPECT_EQ(r.k, 3u);
  EXPECT_TRUE(r.includes_original);
  // original is a home: not counted twice
  r = KAnonymity(masked, f.Unproject({10, 0}), homes, 50);
  EXPECT_EQ(r.k, 2u);
  // original outside the disk
  r = KAnonymity(masked, f.Unproject({-80, 0}), homes, 50);
  EXPECT_EQ(r.k, 2u);
  // empty disk still reports k = 1
  r = KAnonymity(f.Unproject({5000, 0}), std::nullopt, homes, 1);
  EXPECT_EQ(r.k, 1u);
  EXPECT_EQ(r.risk.value(), 1.0);
}

TEST(KAnonymity, MonotoneInRadius) {
  const auto homes = PointIndex::Build(testing::UniformHomes({42, -71}, 2000, 3000, 3));
  Rng rng = SubstreamRng(2, 0);
  const LocalFrame f({42, -71});
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p = f.Unproject({(UniformUnit(rng) - 0.5) * 2000, (UniformUnit(rng) - 0.5) * 2000});
    uint64_t prev = 0;
    for (double r = 0; r < 400; r += 25) {
      const uint64_t k = KAnonymity(p, p, homes, r).k;
      EXPECT_GE(k, prev);
      EXPECT_GE(k, 1u);
      prev = k;
    }
  }
}

TEST(KAnonymity, PoissonMean) {
  // homes at density rho; a masked point inside the region with its original
  // (not a home) inside the disk: E[k] = 1 + rho * pi * r^2
  const double side = 4000, r = 60;
  const size_t n_homes = 40000;
  const double rho = n_homes / (side * side);
  const auto homes = PointIndex::Build(testing::UniformHomes({42, -71}, side, n_homes, 5));
  const LocalFrame f({42, -71});
  Rng rng = SubstreamRng(6, 0);
  double sum = 0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const GeoPoint p = f.Unproject({(UniformUnit(rng) - 0.5) * 3000, (UniformUnit(rng) - 0.5) * 3000});
    sum += static_cast<double>(KAnonymity(p, p, homes, r).k);
  }
  EXPECT_NEAR(sum / n, 1 + rho * kPi * r * r, 0.05 * (1 + rho * kPi * r * r));
}

TEST(EvaluateDataset, MatchesLinearScan) {
  const auto city = testing::City();
  const auto recs = testing::CityTraces(city, 10, 3, 0, 8);
  const auto home_pts = SampleResidentialPoints(city, 20, 8);
  const auto homes = PointIndex::Build(home_pts);
  MaskRequest req;
  req.population = &city;
  const auto masked = MaskDataset(recs, req).records;
  const auto report = EvaluateDataset(masked, homes, {0.95, 5});
  ASSERT_EQ(report.points.size(), masked.size());
  for (size_t i = 0; i < masked.size(); ++i) {
    const double r = BufferRadius(masked[i].sigma_eff_m, 0.95);
    uint64_t k = 0;
    bool original_is_home = false;
    for (const auto& h : home_pts) {
      k += HaversineDistance(h.point, masked[i].masked_point) <= r;
      original_is_home |= h.point == masked[i].original.point;
    }
    if (!original_is_home &&
        HaversineDistance(masked[i].original.point, masked[i].masked_point) <= r) {
      ++k;
    }
    EXPECT_EQ(report.points[i].k, std::max<uint64_t>(k, 1));
  }
  const auto& s = report.summary;
  EXPECT_EQ(s.n, masked.size());
  EXPECT_EQ(s.mechanism, "gaussian-skew");
  EXPECT_LE(static_cast<double>(s.min_k), s.median_k);
  for (const auto& [user, k] : report.per_user_min_k) EXPECT_GE(k, s.worst_case_user_k);
  EXPECT_EQ(CodeOf([&] { EvaluateDataset(masked, PointIndex::Build({}), {}); }),
            ErrorCode::kNoResidentialData);
}

TEST(Summarize, MedianAndFraction) {
  std::vector<MaskedRecord> masked(4);
  std::vector<KAnonResult> pts(4);
  const uint64_t ks[] = {1, 7, 3, 10};
  for (int i = 0; i < 4; ++i) {
    masked[i].original.user_id = i < 2 ? "a" : "b";
    masked[i].displacement = {3.0 * i, 4.0 * i};
    pts[i].k = ks[i];
  }
  const auto s = Summarize(masked, pts, {0.95, 5});
  EXPECT_EQ(s.median_k, 5.0);
  EXPECT_EQ(s.mean_k, 21.0 / 4);
  EXPECT_EQ(s.fraction_k_ge_target, 0.5);
  EXPECT_EQ(s.min_k, 1u);
  EXPECT_EQ(s.mean_displacement_m, (0 + 5 + 10 + 15) / 4.0);
}

class Calibration : public ::testing::Test {
 protected:
  PopulationDataset city = testing::City();
  std::vector<TraceRecord> sample = [this] {
    auto t = testing::CityTraces(city, 20, 4, 0, 2);
    return t;
  }();
};

TEST_F(Calibration, SmallestGridValueMeetingTarget) {
  const auto homes = PointIndex::Build(SampleResidentialPoints(city, 20, 1));
  CalibrationRequest req;
  req.population = &city;
  req.k_target = 10;
  req.seed = 3;
  req.replicates = 1;
  req.margin_z = 0;
  const auto res = CalibrateC(sample, homes, req);
  EXPECT_GE(res.achieved_fraction, 0.95);
  EXPECT_NEAR(res.c_m, std::pow(1.25, static_cast<double>(res.steps - 1)), 1e-9 * res.c_m);
  // the previous grid value fails the target
  ASSERT_GT(res.steps, 1u);
  MaskRequest mask;
  mask.population = &city;
  mask.seed = 3;
  mask.gaussian.c_m = res.c_m / 1.25;
  const auto masked = MaskDataset(sample, mask).records;
  const auto report = EvaluateDataset(masked, homes, {0.95, 10});
  EXPECT_LT(report.summary.fraction_k_ge_target, 0.95);
}

TEST_F(Calibration, DenserHomesNeverNeedLargerC) {
  const auto sparse = PointIndex::Build(SampleResidentialPoints(city, 40, 1));
  const auto dense = PointIndex::Build(SampleResidentialPoints(city, 20, 1));
  for (uint64_t seed : {1, 2, 3}) {
    CalibrationRequest req;
    req.population = &city;
    req.seed = seed;
    EXPECT_LE(CalibrateC(sample, dense, req).c_m, CalibrateC(sample, sparse, req).c_m);
  }
}

TEST_F(Calibration, MarginAndReplicatesOnlyRaiseC) {
  const auto homes = PointIndex::Build(SampleResidentialPoints(city, 20, 1));
  CalibrationRequest raw;
  raw.population = &city;
  raw.seed = 4;
  raw.replicates = 1;
  raw.margin_z = 0;
  const double base = CalibrateC(sample, homes, raw).c_m;
  CalibrationRequest strict = raw;
  strict.replicates = 3;
  const double replicated = CalibrateC(sample, homes, strict).c_m;
  strict.margin_z = 3;
  const auto res = CalibrateC(sample, homes, strict);
  EXPECT_LE(base, replicated);
  EXPECT_LE(replicated, res.c_m);
  EXPECT_GE(res.achieved_fraction, 0.95);
  strict.replicates = 0;
  EXPECT_EQ(CodeOf([&] { CalibrateC(sample, homes, strict); }), ErrorCode::kInvalidArgument);
  strict.replicates = 1;
  strict.margin_z = -1;
  EXPECT_EQ(CodeOf([&] { CalibrateC(sample, homes, strict); }), ErrorCode::kInvalidArgument);
}

TEST_F(Calibration, UnreachableTarget) {
  const auto homes = PointIndex::Build({{"only", {42.355, -71.105}}});
  CalibrationRequest req;
  req.population = &city;
  req.c_max_m = 1e3;
  EXPECT_EQ(CodeOf([&] { CalibrateC(sample, homes, req); }), ErrorCode::kTargetUnreachable);
}

}  // namespace
}  // namespace geomask
