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

#ifndef GEOMASK_TRACESIM_H_
#define GEOMASK_TRACESIM_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "geomask/geo.h"
#include "geomask/ingest.h"
#include "geomask/mask.h"
#include "geomask/privacy.h"

namespace geomask {

inline constexpr double kDefaultContactDistanceM = 10.0;
inline constexpr int64_t kDefaultContactWindowS = 900;

struct SimConfig {
  uint64_t n_users = 100;
  uint64_t n_infected = 5;
  uint64_t duration_hours = 24;
  uint64_t step_minutes = 5;
  double speed_mps = 1.4;
  uint64_t seed = 0;
  Timestamp start = Timestamp{std::chrono::seconds{1609459200}};  // 2021-01-01
  const PopulationDataset* world = nullptr;

  void Validate() const;
};

std::string SimUserId(uint64_t index);

// Random-waypoint traces: each user walks at speed_mps toward waypoints
// drawn from block groups with probability proportional to total_density,
// emitting one record every step_minutes. Records are grouped by user, in
// time order within a user.
std::vector<TraceRecord> GenerateTraces(const SimConfig& cfg);

// The first n_infected simulated users.
std::set<std::string> InfectedUsers(const SimConfig& cfg);

struct ExposureEvent {
  std::string infected_id;
  std::string contact_id;
  Timestamp timestamp;  // infected record's time
  double distance_m = 0.0;
  int64_t bucket = 0;

  friend bool operator==(const ExposureEvent&, const ExposureEvent&) = default;
};

struct ExposureParams {
  double d_max_m = kDefaultContactDistanceM;
  int64_t t_window_s = kDefaultContactWindowS;

  void Validate() const;
};

// Dedup bucket of an infected record's timestamp.
int64_t TimeBucket(Timestamp t, int64_t t_window_s);

// One event per (infected, contact, bucket) over all record pairs with
// |dt| <= t_window_s and distance <= d_max_m; the representative is the
// earliest pair (then the closest, then the contact record's time). Sorted
// by (infected, contact, bucket).
std::vector<ExposureEvent> DetectExposures(const std::vector<TraceRecord>& records,
                                           const std::set<std::string>& infected,
                                           const ExposureParams& params);

struct UtilityMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  uint64_t true_events = 0;
  uint64_t detected_events = 0;
  uint64_t matched_events = 0;
};

// Events match on (infected, contact, bucket).
UtilityMetrics Utility(const std::vector<ExposureEvent>& truth,
                       const std::vector<ExposureEvent>& detected);

std::vector<TraceRecord> MaskedTraces(const std::vector<MaskedRecord>& masked);

struct SweepRequest {
  Mechanism mechanism = Mechanism::kGaussianSkew;
  // c values (m) for gaussian-skew, epsilon values (1/m) for planar-laplace.
  std::vector<double> grid;
  MaskConfig gaussian;  // c_m replaced per row
  GeoIndConfig geoind;  // epsilon replaced per row
  const PopulationDataset* population = nullptr;
  const AgeBrackets* age_brackets = nullptr;
  std::set<std::string> infected;
  ExposureParams exposure;
  uint64_t k_target = 5;
  double coverage = kDefaultCoverage;
  // k is evaluated on an evenly strided subset of at most this many records
  // (0 = all records).
  size_t max_eval_points = 5000;
  uint64_t seed = 0;
};

struct SweepRow {
  double parameter = 0.0;
  double median_k = 0.0;
  double frac_k_ge_target = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mean_displacement_m = 0.0;
};

// One row per grid value, in grid order.
std::vector<SweepRow> TradeoffSweep(const std::vector<TraceRecord>& records,
                                    const PointIndex& homes, const SweepRequest& request);

}  // namespace geomask

#endif  // GEOMASK_TRACESIM_H_
