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

#include <algorithm>
#include <cmath>

#include "geomask/error.h"

namespace geomask {

namespace {

void CheckCoverage(double coverage) {
  if (!(coverage > 0.0 && coverage < 1.0)) {
    throw Error(ErrorCode::kInvalidCoverage,
                "coverage must be in (0, 1), got " + std::to_string(coverage));
  }
}

}  // namespace

double BufferRadius(double sigma_m, double coverage) {
  CheckCoverage(coverage);
  return sigma_m * std::sqrt(-2.0 * std::log1p(-coverage));
}

double LaplaceBufferRadius(double epsilon_per_m, double coverage) {
  CheckCoverage(coverage);
  return PlanarLaplaceInverseCdf(epsilon_per_m, coverage);
}

double BufferRadiusFor(const MaskedRecord& record, double coverage) {
  switch (record.mechanism) {
    case Mechanism::kPlanarLaplace:
      if (!record.epsilon_per_m) {
        throw Error(ErrorCode::kInvalidArgument,
                    "planar-laplace record without epsilon");
      }
      return LaplaceBufferRadius(*record.epsilon_per_m, coverage);
    case Mechanism::kGaussianSkew:
    case Mechanism::kRedactOnly:
      return BufferRadius(record.sigma_eff_m, coverage);
  }
  return 0.0;
}

KAnonResult KAnonymity(const GeoPoint& masked_point,
                       const std::optional<GeoPoint>& original, const PointIndex& homes,
                       double radius_m) {
  if (!(radius_m >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "buffer radius must be >= 0");
  }
  KAnonResult out;
  out.buffer_radius_m = radius_m;
  uint64_t k = homes.CountWithinRadius(masked_point, radius_m);
  if (original && HaversineDistance(masked_point, *original) <= radius_m &&
      homes.CountWithinRadius(*original, 0.0) == 0) {
    out.includes_original = true;
    ++k;
  }
  out.k = std::max<uint64_t>(k, 1);
  out.risk = {1, out.k};
  return out;
}

KAnonResult KAnonymity(const MaskedRecord& record, const PointIndex& homes,
                       double radius_m) {
  return KAnonymity(record.masked_point, record.original.point, homes, radius_m);
}

EvalSummary Summarize(const std::vector<MaskedRecord>& masked,
                      const std::vector<KAnonResult>& points, const EvalOptions& options) {
  EvalSummary s;
  s.n = points.size();
  s.k_target = options.k_target;
  s.coverage = options.coverage;
  if (!masked.empty()) s.mechanism = std::string(MechanismName(masked.front().mechanism));
  for (const auto& r : masked) {
    if (std::string(MechanismName(r.mechanism)) != s.mechanism) {
      s.mechanism = "mixed";
      break;
    }
  }
  if (points.empty()) return s;

  std::vector<uint64_t> ks;
  ks.reserve(points.size());
  double sum = 0.0;
  size_t meeting = 0;
  for (const auto& p : points) {
    ks.push_back(p.k);
    sum += static_cast<double>(p.k);
    meeting += p.k >= options.k_target;
  }
  std::sort(ks.begin(), ks.end());
  s.min_k = ks.front();
  const size_t n = ks.size();
  s.median_k = n % 2 ? static_cast<double>(ks[n / 2])
                     : (static_cast<double>(ks[n / 2 - 1]) + static_cast<double>(ks[n / 2])) / 2.0;
  s.mean_k = sum / static_cast<double>(n);
  s.fraction_k_ge_target = static_cast<double>(meeting) / static_cast<double>(n);

  double disp = 0.0;
  for (const auto& r : masked) disp += r.DisplacementMeters();
  s.mean_displacement_m = masked.empty() ? 0.0 : disp / static_cast<double>(masked.size());

  std::map<std::string, uint64_t> per_user;
  for (size_t i = 0; i < masked.size() && i < points.size(); ++i) {
    auto [it, inserted] = per_user.emplace(masked[i].original.user_id, points[i].k);
    if (!inserted) it->second = std::min(it->second, points[i].k);
  }
  s.worst_case_user_k = s.min_k;
  for (const auto& [user, k] : per_user) s.worst_case_user_k = std::min(s.worst_case_user_k, k);
  return s;
}

EvalReport EvaluateDataset(const std::vector<MaskedRecord>& masked, const PointIndex& homes,
                           const EvalOptions& options) {
  CheckCoverage(options.coverage);
  if (homes.size() == 0) {
    throw Error(ErrorCode::kNoResidentialData,
                "k-anonymity evaluation needs at least one residential point");
  }
  EvalReport report;
  report.points.reserve(masked.size());
  for (const auto& r : masked) {
    report.points.push_back(KAnonymity(r, homes, BufferRadiusFor(r, options.coverage)));
  }
  for (size_t i = 0; i < masked.size(); ++i) {
    auto [it, inserted] =
        report.per_user_min_k.emplace(masked[i].original.user_id, report.points[i].k);
    if (!inserted) it->second = std::min(it->second, report.points[i].k);
  }
  report.summary = Summarize(masked, report.points, options);
  return report;
}

CalibrationResult CalibrateC(const std::vector<TraceRecord>& sample, const PointIndex& homes,
                             const CalibrationRequest& request) {
  if (sample.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "calibration sample is empty");
  }
  if (request.population == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "calibration requires population data");
  }
  if (homes.size() == 0) {
    throw Error(ErrorCode::kNoResidentialData, "calibration needs residential points");
  }
  if (!(request.step_factor > 1.0) || !(request.c_start_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration grid must be increasing");
  }
  if (!(request.margin_z >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration margin must be >= 0");
  }
  if (request.replicates < 1) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs at least one replicate");
  }
  MaskRequest mask;
  mask.mechanism = Mechanism::kGaussianSkew;
  mask.gaussian = request.base;
  mask.population = request.population;
  mask.age_brackets = request.age_brackets;

  CalibrationResult best;
  // Grid points are computed from the index; repeated multiplication drifts.
  for (size_t j = 0;; ++j) {
    const double c = request.c_start_m * std::pow(request.step_factor, static_cast<double>(j));
    if (c > request.c_max_m * (1.0 + 1e-12)) break;
    mask.gaussian.c_m = c;
    double fraction = 1.0;
    bool passed = true;
    for (int rep = 0; rep < request.replicates; ++rep) {
      mask.seed = rep == 0 ? request.seed : SplitMix64(request.seed ^ SplitMix64(rep));
      const MaskResult masked = MaskDataset(sample, mask);
      size_t meeting = 0;
      for (const auto& r : masked.records) {
        meeting += KAnonymity(r, homes, BufferRadiusFor(r, request.coverage)).k >=
                   request.k_target;
      }
      const double n = static_cast<double>(masked.records.size());
      const double f = static_cast<double>(meeting) / n;
      fraction = std::min(fraction, f);
      if (f - request.margin_z * std::sqrt(f * (1.0 - f) / n) < request.required_fraction) {
        passed = false;
        break;
      }
    }
    best.steps = j + 1;
    best.c_m = c;
    best.achieved_fraction = fraction;
    if (passed) return best;
  }
  throw Error(ErrorCode::kTargetUnreachable,
              "no c up to " + std::to_string(request.c_max_m) + " m reaches k >= " +
                  std::to_string(request.k_target) + " for " +
                  std::to_string(request.required_fraction * 100.0) + "% of points");
}

}  // namespace geomask
