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

#ifndef GEOMASK_INGEST_H_
#define GEOMASK_INGEST_H_

#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "geomask/geo.h"

namespace geomask {

using Timestamp = std::chrono::sys_seconds;

// Accepts YYYY-MM-DDTHH:MM:SS followed by Z or a +HH:MM / -HH:MM offset.
std::optional<Timestamp> ParseTimestamp(std::string_view text);
// Always emits the UTC form YYYY-MM-DDTHH:MM:SSZ.
std::string FormatTimestamp(Timestamp t);

struct TraceRecord {
  std::string user_id;
  Timestamp timestamp;
  GeoPoint point;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct RowError {
  size_t line = 0;  // 1-based line number in the file
  std::string reason;
};

struct TraceParseResult {
  std::vector<TraceRecord> records;
  std::vector<RowError> errors;
  size_t data_rows = 0;
};

// CSV with header `user_id,timestamp,lat,lon`. Bad rows land in `errors`;
// a missing or wrong header throws Error(kMissingHeader).
TraceParseResult ParseTraces(std::istream& in);
TraceParseResult ParseTracesFile(const std::string& path);

void WriteTraces(std::ostream& out, const std::vector<TraceRecord>& records);

// Population ---------------------------------------------------------------

class BlockGroup {
 public:
  // Area is taken from the polygons. Throws Error(kNonPositiveDensity) when
  // total_density <= 0 or any age density is negative.
  BlockGroup(std::string id, std::vector<Polygon> parts, double total_density,
             std::map<std::string, double> age_densities);
  // Explicit-area form for fixtures whose areas must be exact.
  BlockGroup(std::string id, std::vector<Polygon> parts, double total_density,
             std::map<std::string, double> age_densities, double area_km2);

  const std::string& id() const { return id_; }
  const std::vector<Polygon>& parts() const { return parts_; }
  double total_density() const { return total_density_; }
  const std::map<std::string, double>& age_densities() const { return age_densities_; }
  // Zero when the bracket is absent for this group.
  double age_density(const std::string& bracket) const;
  double area_km2() const { return area_km2_; }

  bool Contains(const GeoPoint& p) const;
  GeoPoint min_corner() const { return min_; }
  GeoPoint max_corner() const { return max_; }

 private:
  std::string id_;
  std::vector<Polygon> parts_;
  double total_density_;
  std::map<std::string, double> age_densities_;
  double area_km2_;
  GeoPoint min_, max_;
};

// Block groups plus the dataset-wide averages ATPD (total) and AGPD (per age
// bracket), both area-weighted means recomputed from the groups.
class PopulationDataset {
 public:
  explicit PopulationDataset(std::vector<BlockGroup> groups);

  const std::vector<BlockGroup>& groups() const { return groups_; }
  double average_total_density() const { return atpd_; }
  // Throws Error(kInvalidArgument) for an unknown bracket.
  double average_age_density(const std::string& bracket) const;
  const std::map<std::string, double>& average_age_densities() const { return agpd_; }
  const std::vector<std::string>& brackets() const { return brackets_; }

  // Group containing p; on shared boundaries the lowest id wins. nullptr
  // when p lies outside every group.
  const BlockGroup* Locate(const GeoPoint& p) const;

  // Bounding box over all groups.
  GeoPoint min_corner() const { return min_; }
  GeoPoint max_corner() const { return max_; }
  GeoPoint center() const;

 private:
  std::vector<BlockGroup> groups_;
  // Group positions sorted by id, for the lowest-id tie-break.
  std::vector<size_t> by_id_;
  double atpd_ = 0.0;
  std::map<std::string, double> agpd_;
  std::vector<std::string> brackets_;
  GeoPoint min_{}, max_{};
};

// GeoJSON FeatureCollection of Polygon / MultiPolygon features carrying
// `id`, `total_density` and an `age_density` object.
PopulationDataset ParsePopulation(std::string_view geojson);
PopulationDataset ParsePopulationFile(const std::string& path);

// Residential points -------------------------------------------------------

using ResidentialPoints = std::vector<IndexedPoint>;

// CSV `id,lat,lon`.
ResidentialPoints ParseResidentialFile(const std::string& path);
ResidentialPoints ParseResidential(std::istream& in);

// n = round(total_density * area_km2 / persons_per_point) points per block
// group, uniformly placed strictly inside the group by rejection sampling.
ResidentialPoints SampleResidentialPoints(const PopulationDataset& pop,
                                          uint64_t persons_per_point,
                                          uint64_t seed);

// Zones --------------------------------------------------------------------

enum class ZoneLabel { kPrivate, kPublic, kDanger };

std::string_view ZoneLabelName(ZoneLabel label);
std::optional<ZoneLabel> ParseZoneLabel(std::string_view text);

struct Circle {
  GeoPoint center;
  double radius_m = 0.0;
};

struct Zone {
  std::string id;
  std::variant<Polygon, Circle> geometry;
  ZoneLabel label;

  // Boundary inclusive for both shapes.
  bool Contains(const GeoPoint& p) const;
};

struct ZoneSet {
  std::vector<Zone> zones;

  bool HasLabel(ZoneLabel label) const;
};

// Polygon features, or Point features with `radius_m`; every feature needs a
// `label` of private, public or danger.
ZoneSet ParseZones(std::string_view geojson);
ZoneSet ParseZonesFile(const std::string& path);

// Splits one CSV line; double-quoted fields may contain commas and "".
std::vector<std::string> SplitCsvLine(std::string_view line);

// Age sidecar --------------------------------------------------------------

// CSV `user_id,bracket`.
using AgeBrackets = std::unordered_map<std::string, std::string>;
AgeBrackets ParseAgeBrackets(std::istream& in);
AgeBrackets ParseAgeBracketsFile(const std::string& path);

}  // namespace geomask

#endif  // GEOMASK_INGEST_H_
