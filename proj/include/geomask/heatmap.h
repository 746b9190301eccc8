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

#ifndef GEOMASK_HEATMAP_H_
#define GEOMASK_HEATMAP_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geomask/geo.h"
#include "geomask/ingest.h"

namespace geomask {

inline constexpr int kDefaultRetentionDays = 14;

// Keeps records with now - timestamp <= window_days (inclusive).
std::vector<TraceRecord> RetentionFilter(const std::vector<TraceRecord>& records,
                                         Timestamp now, int window_days);

// Grid anchored at its south-west corner. Rows grow north, columns east.
struct GridSpec {
  GeoPoint origin;
  double cell_size_m = 100.0;
  int64_t rows = 0;
  int64_t cols = 0;

  void Validate() const;
};

using CellKey = std::pair<int64_t, int64_t>;  // (row, col)

// Cell for p under half-open [x, x + cell) intervals, or nullopt when p is
// outside the grid extent.
std::optional<CellKey> CellOf(const GridSpec& spec, const GeoPoint& p);

// Corners of a cell as a closed ring, counter-clockwise from south-west.
std::vector<GeoPoint> CellRing(const GridSpec& spec, const CellKey& cell);

enum class HeatClass { kRedOrange, kGreen, kBlue, kSuppressed };
std::string_view HeatClassName(HeatClass c);

enum class HeatMode { kSingleUser, kMultiUser };

struct HeatCell {
  int64_t row = 0;
  int64_t col = 0;
  uint64_t visit_count = 0;
  uint64_t distinct_users = 0;
  HeatClass heat_class = HeatClass::kBlue;
};

class HeatMap {
 public:
  HeatMap(GridSpec spec, HeatMode mode, uint64_t k_min = 1);

  const GridSpec& spec() const { return spec_; }
  HeatMode mode() const { return mode_; }
  uint64_t k_min() const { return k_min_; }

  // Public view. Suppressed cells are present with zero counts and the
  // kSuppressed class; writers omit them.
  const std::map<CellKey, HeatCell>& cells() const { return cells_; }

  // Raw tallies kept for coarsening and audits, suppressed cells included.
  uint64_t RawVisitCount() const;
  const std::map<CellKey, std::set<std::string>>& cell_users() const { return users_; }
  const std::map<CellKey, uint64_t>& cell_visits() const { return visits_; }

  // Adds one record; false when outside the grid.
  bool Add(const TraceRecord& record);

  // Rebuilds cells() from the raw tallies: suppression (multi-user) then
  // classification.
  void Finalize();

 private:
  friend HeatMap Classify(HeatMap map);
  friend HeatMap Coarsen(const HeatMap& map, int factor);

  GridSpec spec_;
  HeatMode mode_;
  uint64_t k_min_;
  std::map<CellKey, HeatCell> cells_;
  std::map<CellKey, uint64_t> visits_;
  std::map<CellKey, std::set<std::string>> users_;
};

// Tertile classes over non-suppressed, non-zero cells: a cell is red-orange
// when fewer than a third of cells are strictly hotter, green when fewer
// than two thirds are, blue otherwise. Throws Error(kEmptyMap) when no cell
// qualifies.
HeatMap Classify(HeatMap map);

// Case 1: one user's history outside private zones. Throws
// Error(kMultipleUsers) if the records belong to more than one user.
HeatMap AggregateSingle(const std::vector<TraceRecord>& records, const GridSpec& spec,
                        const ZoneSet& zones);

// Case 2: all users, cells with fewer than k_min distinct users suppressed.
HeatMap AggregateMulti(const std::vector<TraceRecord>& records, const GridSpec& spec,
                       uint64_t k_min, const ZoneSet& zones);

// Merges factor x factor blocks. Visits add up; distinct users are the union
// of the underlying user sets. Suppression and classes are recomputed.
HeatMap Coarsen(const HeatMap& map, int factor);

struct DangerAlert {
  std::string zone_id;
  std::string user_id;
  Timestamp timestamp;
};

// One alert per (record, danger zone) containment, ordered by timestamp
// then zone id.
std::vector<DangerAlert> DangerOverlay(const ZoneSet& zones,
                                       const std::vector<TraceRecord>& records);

}  // namespace geomask

#endif  // GEOMASK_HEATMAP_H_
