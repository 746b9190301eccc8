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

#ifndef GEOMASK_OUTPUT_H_
#define GEOMASK_OUTPUT_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geomask/heatmap.h"
#include "geomask/mask.h"
#include "geomask/privacy.h"
#include "geomask/tracesim.h"

namespace geomask {

// Masked CSV:
//   user_id,timestamp,lat,lon,mechanism,sigma_eff,displacement_m,k,risk
// k and risk are empty unless `kanon` is given (same length as records).
// sigma_eff is empty for planar-laplace rows.
void WriteMaskedCsv(std::ostream& out, const std::vector<MaskedRecord>& records,
                    const std::vector<KAnonResult>* kanon = nullptr);

// A row read back from a masked CSV. The original location is not part of
// the format.
struct MaskedRow {
  std::string user_id;
  Timestamp timestamp;
  GeoPoint point;
  Mechanism mechanism = Mechanism::kGaussianSkew;
  std::optional<double> sigma_eff_m;
  double displacement_m = 0.0;
};

// Throws Error(kMissingHeader) / Error(kRowParseError).
std::vector<MaskedRow> ParseMaskedCsv(std::istream& in);

// {"summary": {...}, "points": [...]} plus the seed and per-user minima.
std::string EvalReportJson(const EvalReport& report, const std::vector<MaskedRecord>& masked,
                           uint64_t seed);

// FeatureCollection of visible cells; suppressed cells are left out and
// distinct_users is only emitted in multi-user mode.
std::string HeatMapGeoJson(const HeatMap& map);

void WriteAlertsCsv(std::ostream& out, const std::vector<DangerAlert>& alerts);

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

}  // namespace geomask

#endif  // GEOMASK_OUTPUT_H_
