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

#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.h"
#include "geomask/error.h"

namespace geomask {
namespace {

using std::chrono::days;
using std::chrono::seconds;

const GridSpec kSpec{{42.0, -71.0}, 100.0, 10, 10};

TraceRecord At(const std::string& user, double x, double y, int64_t t = 0) {
  const LocalFrame f(kSpec.origin);
  return {user, Timestamp{seconds{t}}, f.Unproject({x, y})};
}

TEST(Retention, InclusiveBoundary) {
  const Timestamp now{seconds{100 * 86400}};
  std::vector<TraceRecord> recs{{"a", now - days{14}, {0, 0}},
                                {"a", now - days{15}, {0, 0}},
                                {"a", now - days{14} - seconds{1}, {0, 0}},
                                {"a", now, {0, 0}}};
  const auto kept = RetentionFilter(recs, now, kDefaultRetentionDays);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].timestamp, now - days{14});
  EXPECT_THROW(RetentionFilter(recs, now, 0), Error);
}

TEST(Grid, HalfOpenCells) {
  EXPECT_EQ(CellOf(kSpec, At("a", 50, 50).point), (CellKey{0, 0}));
  EXPECT_EQ(CellOf(kSpec, At("a", 150, 50).point), (CellKey{0, 1}));
  EXPECT_EQ(CellOf(kSpec, kSpec.origin), (CellKey{0, 0}));
  EXPECT_FALSE(CellOf(kSpec, At("a", -1, 50).point));
  EXPECT_FALSE(CellOf(kSpec, At("a", 1001, 50).point));
  // the shared edge of two cells belongs to the upper one
  const LocalFrame f(kSpec.origin);
  const GeoPoint edge = f.Unproject({250, 200});
  const auto cell = CellOf(kSpec, edge);
  ASSERT_TRUE(cell);
  const auto ring = CellRing(kSpec, *cell);
  ASSERT_EQ(ring.size(), 5u);
  EXPECT_EQ(ring.front(), ring.back());
}

TEST(Single, CountsAndRedaction) {
  std::vector<TraceRecord> recs{At("u", 10, 10), At("u", 20, 20), At("u", 30, 30),
                                At("u", 510, 510), At("u", 950, 950)};
  ZoneSet zones;
  zones.zones.push_back({"home", Circle{At("u", 950, 950).point, 20}, ZoneLabel::kPrivate});
  const auto map = AggregateSingle(recs, kSpec, zones);
  EXPECT_EQ(map.cells().at({0, 0}).visit_count, 3u);
  EXPECT_EQ(map.cells().at({5, 5}).visit_count, 1u);
  EXPECT_EQ(map.cells().count({9, 9}), 0u);
  EXPECT_EQ(map.cells().at({0, 0}).heat_class, HeatClass::kRedOrange);
  EXPECT_EQ(map.cells().at({5, 5}).heat_class, HeatClass::kGreen);

  EXPECT_TRUE(AggregateSingle({}, kSpec, {}).cells().empty());
  recs.push_back(At("v", 1, 1));
  EXPECT_THROW(AggregateSingle(recs, kSpec, {}), Error);
}

HeatMap WithCounts(const std::vector<uint64_t>& counts) {
  std::vector<TraceRecord> recs;
  for (size_t c = 0; c < counts.size(); ++c) {
    for (uint64_t i = 0; i < counts[c]; ++i) recs.push_back(At("u", 50 + 100.0 * c, 50));
  }
  return AggregateSingle(recs, kSpec, {});
}

TEST(Classify, TertileOracle) {
  auto m = WithCounts({1, 5, 9});
  EXPECT_EQ(m.cells().at({0, 0}).heat_class, HeatClass::kBlue);
  EXPECT_EQ(m.cells().at({0, 1}).heat_class, HeatClass::kGreen);
  EXPECT_EQ(m.cells().at({0, 2}).heat_class, HeatClass::kRedOrange);
  m = WithCounts({4, 4, 4, 4});
  for (const auto& [k, c] : m.cells()) EXPECT_EQ(c.heat_class, HeatClass::kRedOrange);
}

TEST(Classify, PermutationSymmetry) {
  Rng rng = SubstreamRng(3, 0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<uint64_t> counts(10);
    for (auto& c : counts) c = 1 + rng() % 6;
    const auto a = WithCounts(counts);
    std::vector<size_t> perm(counts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<uint64_t> shuffled(counts.size());
    for (size_t i = 0; i < perm.size(); ++i) shuffled[perm[i]] = counts[i];
    const auto b = WithCounts(shuffled);
    for (size_t i = 0; i < perm.size(); ++i) {
      EXPECT_EQ(a.cells().at({0, static_cast<int64_t>(i)}).heat_class,
                b.cells().at({0, static_cast<int64_t>(perm[i])}).heat_class);
    }
  }
}

TEST(Classify, EmptyMapThrows) {
  try {
    Classify(HeatMap(kSpec, HeatMode::kSingleUser));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMap);
  }
}

std::vector<TraceRecord> RandomRecords(Rng& rng, int users, int n) {
  std::vector<TraceRecord> recs;
  for (int i = 0; i < n; ++i) {
    // some points fall outside the grid on purpose
    recs.push_back(At("u" + std::to_string(rng() % users), -100 + 1200 * UniformUnit(rng),
                      -100 + 1200 * UniformUnit(rng), i));
  }
  return recs;
}

TEST(Multi, SuppressionAndConservation) {
  Rng rng = SubstreamRng(4, 0);
  for (uint64_t k_min : {1, 2, 5}) {
    const auto recs = RandomRecords(rng, 12, 600);
    const auto map = AggregateMulti(recs, kSpec, k_min, {});
    uint64_t in_extent = 0;
    std::map<CellKey, std::set<std::string>> oracle;
    for (const auto& r : recs) {
      if (auto c = CellOf(kSpec, r.point)) {
        ++in_extent;
        oracle[*c].insert(r.user_id);
      }
    }
    EXPECT_EQ(map.RawVisitCount(), in_extent);
    uint64_t emitted = 0, hidden = 0;
    for (const auto& [key, cell] : map.cells()) {
      if (cell.heat_class == HeatClass::kSuppressed) {
        EXPECT_EQ(cell.visit_count, 0u);
        EXPECT_EQ(cell.distinct_users, 0u);
        EXPECT_LT(oracle[key].size(), k_min);
        hidden += map.cell_visits().at(key);
      } else {
        EXPECT_GE(cell.distinct_users, k_min);
        EXPECT_EQ(cell.distinct_users, oracle[key].size());
        emitted += cell.visit_count;
      }
    }
    EXPECT_EQ(emitted + hidden, in_extent);
    if (k_min == 1) {
      EXPECT_EQ(hidden, 0u);
    }
  }
}

TEST(Coarsen, ConservesVisitsAndUnionsUsers) {
  Rng rng = SubstreamRng(5, 0);
  const auto recs = RandomRecords(rng, 8, 400);
  const auto fine = AggregateMulti(recs, kSpec, 3, {});
  EXPECT_EQ(Coarsen(fine, 1).RawVisitCount(), fine.RawVisitCount());
  for (int factor : {2, 3, 4}) {
    const auto coarse = Coarsen(fine, factor);
    EXPECT_EQ(coarse.RawVisitCount(), fine.RawVisitCount());
    std::map<CellKey, std::set<std::string>> users;
    for (const auto& [key, set] : fine.cell_users()) {
      users[{key.first / factor, key.second / factor}].insert(set.begin(), set.end());
    }
    for (const auto& [key, set] : users) {
      EXPECT_EQ(coarse.cell_users().at(key), set);
      const auto& cell = coarse.cells().at(key);
      if (cell.heat_class != HeatClass::kSuppressed) {
        EXPECT_EQ(cell.distinct_users, set.size());
      }
    }
    // never below any constituent
    for (const auto& [key, set] : fine.cell_users()) {
      EXPECT_GE(coarse.cell_users().at({key.first / factor, key.second / factor}).size(),
                set.size());
    }
  }
  EXPECT_THROW(Coarsen(fine, 0), Error);
}

TEST(Danger, AlertsSortedByTime) {
  ZoneSet zones;
  zones.zones.push_back({"lab", Circle{At("u", 500, 500).point, 300}, ZoneLabel::kDanger});
  zones.zones.push_back({"cafe", Circle{At("u", 500, 500).point, 300}, ZoneLabel::kPublic});
  EXPECT_TRUE(DangerOverlay(ZoneSet{}, {At("u", 500, 500)}).empty());
  Rng rng = SubstreamRng(6, 0);
  std::vector<TraceRecord> recs;
  for (int i = 0; i < 100; ++i) {
    recs.push_back(At("u", 1000 * UniformUnit(rng), 1000 * UniformUnit(rng),
                      static_cast<int64_t>(rng() % 100000)));
  }
  const auto alerts = DangerOverlay(zones, recs);
  size_t expected = 0;
  for (const auto& r : recs) expected += zones.zones[0].Contains(r.point);
  EXPECT_EQ(alerts.size(), expected);
  EXPECT_TRUE(std::is_sorted(alerts.begin(), alerts.end(), [](const auto& a, const auto& b) {
    return a.timestamp < b.timestamp;
  }));
  for (const auto& a : alerts) EXPECT_EQ(a.zone_id, "lab");
}

}  // namespace
}  // namespace geomask
