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

#include "geomask/output.h"

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.h"
#include "geomask/error.h"
#include "json.hpp"

namespace geomask {
namespace {

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(42.0), "42");
  EXPECT_EQ(FormatDouble(-71.123456789), "-71.123456789");
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(FormatDouble(v)), v);
}

TEST(MaskedCsv, WriteThenParse) {
  const auto city = testing::City();
  const auto recs = testing::CityTraces(city, 3, 1, 0, 4);
  MaskRequest req;
  req.population = &city;
  const auto masked = MaskDataset(recs, req).records;
  std::stringstream s;
  WriteMaskedCsv(s, masked);
  const auto rows = ParseMaskedCsv(s);
  ASSERT_EQ(rows.size(), masked.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].user_id, masked[i].original.user_id);
    EXPECT_EQ(rows[i].timestamp, masked[i].original.timestamp);
    EXPECT_EQ(rows[i].point, masked[i].masked_point);
    EXPECT_EQ(*rows[i].sigma_eff_m, masked[i].sigma_eff_m);
    EXPECT_EQ(rows[i].displacement_m, masked[i].DisplacementMeters());
  }
}

TEST(MaskedCsv, LaplaceRowsHaveNoSigma) {
  MaskedRecord m;
  m.original = {"u", Timestamp{}, {1, 2}};
  m.masked_point = {1, 2};
  m.mechanism = Mechanism::kPlanarLaplace;
  m.epsilon_per_m = 0.01;
  std::vector<KAnonResult> k(1);
  k[0].k = 4;
  k[0].risk = {1, 4};
  std::stringstream s;
  WriteMaskedCsv(s, {m}, &k);
  EXPECT_EQ(s.str(),
            "user_id,timestamp,lat,lon,mechanism,sigma_eff,displacement_m,k,risk\n"
            "u,1970-01-01T00:00:00Z,1,2,planar-laplace,,0,4,0.25\n");
  const auto rows = ParseMaskedCsv(s);
  EXPECT_FALSE(rows[0].sigma_eff_m);
  std::vector<KAnonResult> wrong(2);
  std::stringstream t;
  EXPECT_THROW(WriteMaskedCsv(t, {m}, &wrong), Error);
}

TEST(MaskedCsv, ParseErrors) {
  std::istringstream empty("");
  EXPECT_THROW(ParseMaskedCsv(empty), Error);
  std::istringstream bad(
      "user_id,timestamp,lat,lon,mechanism,sigma_eff,displacement_m,k,risk\n"
      "u,1970-01-01T00:00:00Z,1,2,teleport,,0,,\n");
  try {
    ParseMaskedCsv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRowParseError);
  }
}

TEST(EvalJson, SummaryRecomputableFromPoints) {
  const auto city = testing::City();
  const auto recs = testing::CityTraces(city, 4, 2, 0, 5);
  MaskRequest req;
  req.population = &city;
  const auto masked = MaskDataset(recs, req).records;
  const auto homes = PointIndex::Build(SampleResidentialPoints(city, 20, 5));
  const auto report = EvaluateDataset(masked, homes, {0.95, 5});
  const auto doc = nlohmann::json::parse(EvalReportJson(report, masked, 77));
  EXPECT_EQ(doc["summary"]["seed"], 77);
  const auto& pts = doc["points"];
  ASSERT_EQ(pts.size(), masked.size());
  uint64_t min_k = UINT64_MAX;
  size_t meeting = 0;
  for (const auto& p : pts) {
    const uint64_t k = p["k"];
    min_k = std::min(min_k, k);
    meeting += k >= 5;
    EXPECT_EQ(p["risk"], "1/" + std::to_string(k));
  }
  EXPECT_EQ(doc["summary"]["min_k"], min_k);
  EXPECT_EQ(doc["summary"]["fraction_k_ge_target"].get<double>(),
            static_cast<double>(meeting) / pts.size());
}

TEST(HeatJson, OmitsSuppressedCells) {
  const GridSpec spec{{42.0, -71.0}, 100.0, 4, 4};
  const LocalFrame f(spec.origin);
  std::vector<TraceRecord> recs;
  for (int u = 0; u < 3; ++u) recs.push_back({"u" + std::to_string(u), Timestamp{}, f.Unproject({50, 50})});
  recs.push_back({"u0", Timestamp{}, f.Unproject({250, 250})});
  const auto map = AggregateMulti(recs, spec, 2, {});
  const auto doc = nlohmann::json::parse(HeatMapGeoJson(map));
  ASSERT_EQ(doc["features"].size(), 1u);
  const auto& props = doc["features"][0]["properties"];
  EXPECT_EQ(props["visit_count"], 3);
  EXPECT_EQ(props["distinct_users"], 3);
  EXPECT_EQ(props["class"], "red-orange");
  const auto ring = doc["features"][0]["geometry"]["coordinates"][0];
  EXPECT_EQ(ring.size(), 5u);
  EXPECT_EQ(ring[0], ring[4]);

  const auto single = AggregateSingle({recs[3]}, spec, {});
  const auto sdoc = nlohmann::json::parse(HeatMapGeoJson(single));
  EXPECT_FALSE(sdoc["features"][0]["properties"].contains("distinct_users"));
}

TEST(SweepCsv, Header) {
  std::stringstream s;
  WriteSweepCsv(s, {{50, 3, 0.5, 1, 0.75, 0.8, 12.5}});
  EXPECT_EQ(s.str(),
            "parameter,median_k,frac_k_ge_target,precision,recall,f1,mean_displacement_m\n"
            "50,3,0.5,1,0.75,0.8,12.5\n");
}

}  // namespace
}  // namespace geomask
