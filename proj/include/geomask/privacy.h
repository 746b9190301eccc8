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

#ifndef GEOMASK_PRIVACY_H_
#define GEOMASK_PRIVACY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geomask/geo.h"
#include "geomask/ingest.h"
#include "geomask/mask.h"

namespace geomask {

inline constexpr double kDefaultCoverage = 0.95;

// Disclosure risk 1/k held as an exact rational.
struct Risk {
  uint64_t numerator = 1;
  uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / denominator; }
};

struct KAnonResult {
  uint64_t k = 1;
  Risk risk;
  double buffer_radius_m = 0.0;
  bool includes_original = false;
};

// Radius of the disk holding the true location with probability `coverage`
// under the Gaussian mechanism (Rayleigh quantile). Throws
// Error(kInvalidCoverage) unless 0 < coverage < 1.
double BufferRadius(double sigma_m, double coverage);
// Same quantile for the planar Laplace radial law.
double LaplaceBufferRadius(double epsilon_per_m, double coverage);

// Radius appropriate for how the record was masked.
double BufferRadiusFor(const MaskedRecord& record, double coverage);

// k = homes within radius of the masked point, plus one for the original
// location when it is inside the buffer and not already an indexed home.
// Floored at 1.
KAnonResult KAnonymity(const GeoPoint& masked_point,
                       const std::optional<GeoPoint>& original, const PointIndex& homes,
                       double radius_m);
KAnonResult KAnonymity(const MaskedRecord& record, const PointIndex& homes,
                       double radius_m);

struct EvalSummary {
  size_t n = 0;
  uint64_t min_k = 0;
  double median_k = 0.0;
  double mean_k = 0.0;
  uint64_t k_target = 1;
  double fraction_k_ge_target = 0.0;
  double mean_displacement_m = 0.0;
  std::string mechanism;
  // Minimum over users of each user's smallest k.
  uint64_t worst_case_user_k = 0;
  double coverage = kDefaultCoverage;
};

struct EvalReport {
  std::vector<KAnonResult> points;
  std::map<std::string, uint64_t> per_user_min_k;
  EvalSummary summary;
};

struct EvalOptions {
  double coverage = kDefaultCoverage;
  uint64_t k_target = 5;
};

// Throws Error(kNoResidentialData) for an empty index.
EvalReport EvaluateDataset(const std::vector<MaskedRecord>& masked, const PointIndex& homes,
                           const EvalOptions& options);

// Recomputes a summary from per-point results; EvaluateDataset uses it too.
EvalSummary Summarize(const std::vector<MaskedRecord>& masked,
                      const std::vector<KAnonResult>& points, const EvalOptions& options);

struct CalibrationRequest {
  const PopulationDataset* population = nullptr;
  const AgeBrackets* age_brackets = nullptr;
  MaskConfig base;  // c_m is ignored; AM and min displacement are kept
  uint64_t k_target = 10;
  double coverage = kDefaultCoverage;
  double required_fraction = 0.95;
  double c_start_m = 1.0;
  double c_max_m = 1e5;
  double step_factor = 1.25;
  // Each grid value is masked this many times with unrelated seeds and must
  // meet the fraction on every one, so the result holds for fresh seeds too.
  int replicates = 3;
  // Binomial standard errors subtracted from each replicate's fraction
  // before it is compared with required_fraction; 0 compares raw fractions.
  double margin_z = 3.0;
  uint64_t seed = 0;
};

struct CalibrationResult {
  double c_m = 0.0;
  double achieved_fraction = 0.0;
  size_t steps = 0;
};

// Smallest c on the grid c_start * step^j for which the masked sample reaches
// k >= k_target at the required fraction in every replicate. Throws Error(kTargetUnreachable)
// once the grid passes c_max.
CalibrationResult CalibrateC(const std::vector<TraceRecord>& sample, const PointIndex& homes,
                             const CalibrationRequest& request);

}  // namespace geomask

#endif  // GEOMASK_PRIVACY_H_
