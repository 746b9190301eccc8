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

#include "geomask/heatmap.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "geomask/error.h"
#include "geomask/mask.h"

namespace geomask {

std::vector<TraceRecord> RetentionFilter(const std::vector<TraceRecord>& records,
                                         Timestamp now, int window_days) {
  if (window_days < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "window_days must be >= 1, got " + std::to_string(window_days));
  }
  const auto window = std::chrono::days{window_days};
  std::vector<TraceRecord> out;
  for (const auto& r : records) {
    if (now - r.timestamp <= window) out.push_back(r);
  }
  return out;
}

void GridSpec::Validate() const {
  if (!IsValid(origin)) {
    throw Error(ErrorCode::kInvalidArgument, "grid origin out of range");
  }
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cell size must be > 0 m, got " + std::to_string(cell_size_m));
  }
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least one row and column");
  }
  const LocalFrame frame(origin);
  const GeoPoint far = frame.Unproject({static_cast<double>(cols) * cell_size_m,
                                        static_cast<double>(rows) * cell_size_m});
  if (!frame.InFrame(far)) {
    throw Error(ErrorCode::kOutOfFrame, "grid extent exceeds 1 degree from its origin");
  }
}

std::optional<CellKey> CellOf(const GridSpec& spec, const GeoPoint& p) {
  const LocalFrame frame(spec.origin);
  if (!frame.InFrame(p)) return std::nullopt;
  const LocalXY xy = frame.Project(p);
  const auto col = static_cast<int64_t>(std::floor(xy.x / spec.cell_size_m));
  const auto row = static_cast<int64_t>(std::floor(xy.y / spec.cell_size_m));
  if (row < 0 || col < 0 || row >= spec.rows || col >= spec.cols) return std::nullopt;
  return CellKey{row, col};
}

std::vector<GeoPoint> CellRing(const GridSpec& spec, const CellKey& cell) {
  const LocalFrame frame(spec.origin);
  const double x0 = static_cast<double>(cell.second) * spec.cell_size_m;
  const double y0 = static_cast<double>(cell.first) * spec.cell_size_m;
  const double x1 = x0 + spec.cell_size_m;
  const double y1 = y0 + spec.cell_size_m;
  return {frame.Unproject({x0, y0}), frame.Unproject({x1, y0}),
          frame.Unproject({x1, y1}), frame.Unproject({x0, y1}),
          frame.Unproject({x0, y0})};
}

std::string_view HeatClassName(HeatClass c) {
  switch (c) {
    case HeatClass::kRedOrange: return "red-orange";
    case HeatClass::kGreen: return "green";
    case HeatClass::kBlue: return "blue";
    case HeatClass::kSuppressed: return "suppressed";
  }
  return "unknown";
}

HeatMap::HeatMap(GridSpec spec, HeatMode mode, uint64_t k_min)
    : spec_(spec), mode_(mode), k_min_(k_min) {
  spec_.Validate();
  if (k_min_ < 1) throw Error(ErrorCode::kInvalidArgument, "k_min must be >= 1");
}

uint64_t HeatMap::RawVisitCount() const {
  uint64_t total = 0;
  for (const auto& [key, v] : visits_) total += v;
  return total;
}

bool HeatMap::Add(const TraceRecord& record) {
  const auto cell = CellOf(spec_, record.point);
  if (!cell) return false;
  ++visits_[*cell];
  users_[*cell].insert(record.user_id);
  return true;
}

void HeatMap::Finalize() {
  cells_.clear();
  bool any_visible = false;
  for (const auto& [key, visits] : visits_) {
    HeatCell cell{key.first, key.second, visits, users_[key].size(), HeatClass::kBlue};
    if (mode_ == HeatMode::kMultiUser && cell.distinct_users < k_min_) {
      cell.visit_count = 0;
      cell.distinct_users = 0;
      cell.heat_class = HeatClass::kSuppressed;
    } else {
      any_visible = any_visible || cell.visit_count > 0;
    }
    cells_.emplace(key, cell);
  }
  if (any_visible) *this = Classify(std::move(*this));
}

HeatMap Classify(HeatMap map) {
  std::vector<uint64_t> counts;
  for (const auto& [key, cell] : map.cells_) {
    if (cell.heat_class != HeatClass::kSuppressed && cell.visit_count > 0) {
      counts.push_back(cell.visit_count);
    }
  }
  if (counts.empty()) {
    throw Error(ErrorCode::kEmptyMap, "heat map has no visible non-empty cell");
  }
  std::sort(counts.begin(), counts.end());
  const size_t n = counts.size();
  for (auto& [key, cell] : map.cells_) {
    if (cell.heat_class == HeatClass::kSuppressed || cell.visit_count == 0) continue;
    // Cells strictly hotter than this one.
    const size_t hotter = static_cast<size_t>(
        counts.end() - std::upper_bound(counts.begin(), counts.end(), cell.visit_count));
    if (3 * hotter < n) {
      cell.heat_class = HeatClass::kRedOrange;
    } else if (3 * hotter < 2 * n) {
      cell.heat_class = HeatClass::kGreen;
    } else {
      cell.heat_class = HeatClass::kBlue;
    }
  }
  return map;
}

HeatMap AggregateSingle(const std::vector<TraceRecord>& records, const GridSpec& spec,
                        const ZoneSet& zones) {
  for (const auto& r : records) {
    if (r.user_id != records.front().user_id) {
      throw Error(ErrorCode::kMultipleUsers,
                  "single-user heat map got records for " + records.front().user_id +
                      " and " + r.user_id);
    }
  }
  HeatMap map(spec, HeatMode::kSingleUser);
  for (const auto& r : Redact(records, zones, {}).kept) map.Add(r);
  map.Finalize();
  return map;
}

HeatMap AggregateMulti(const std::vector<TraceRecord>& records, const GridSpec& spec,
                       uint64_t k_min, const ZoneSet& zones) {
  HeatMap map(spec, HeatMode::kMultiUser, k_min);
  for (const auto& r : Redact(records, zones, {}).kept) map.Add(r);
  map.Finalize();
  return map;
}

HeatMap Coarsen(const HeatMap& map, int factor) {
  if (factor < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "coarsening factor must be >= 1, got " + std::to_string(factor));
  }
  if (factor == 1) return map;
  GridSpec spec = map.spec();
  spec.cell_size_m *= factor;
  spec.rows = (spec.rows + factor - 1) / factor;
  spec.cols = (spec.cols + factor - 1) / factor;
  HeatMap out(spec, map.mode(), map.k_min());
  for (const auto& [key, visits] : map.visits_) {
    const CellKey merged{key.first / factor, key.second / factor};
    out.visits_[merged] += visits;
    const auto& users = map.users_.at(key);
    out.users_[merged].insert(users.begin(), users.end());
  }
  out.Finalize();
  return out;
}

std::vector<DangerAlert> DangerOverlay(const ZoneSet& zones,
                                       const std::vector<TraceRecord>& records) {
  std::vector<DangerAlert> alerts;
  for (const auto& r : records) {
    for (const auto& z : zones.zones) {
      if (z.label == ZoneLabel::kDanger && z.Contains(r.point)) {
        alerts.push_back({z.id, r.user_id, r.timestamp});
      }
    }
  }
  std::stable_sort(alerts.begin(), alerts.end(),
                   [](const DangerAlert& a, const DangerAlert& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.zone_id < b.zone_id;
                   });
  return alerts;
}

}  // namespace geomask
