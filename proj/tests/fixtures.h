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

#ifndef GEOMASK_TESTS_FIXTURES_H_
#define GEOMASK_TESTS_FIXTURES_H_

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geomask/geo.h"
#include "geomask/ingest.h"
#include "geomask/rng.h"
#include "geomask/tracesim.h"

namespace geomask::testing {

// Compact synthetic city: a 4x4 grid of rectangular block groups, each
// 0.004 deg of latitude by 0.005 deg of longitude (about 445 m x 410 m).
inline constexpr double kCityLat = 42.350;
inline constexpr double kCityLon = -71.110;
inline constexpr double kCellDLat = 0.004;
inline constexpr double kCellDLon = 0.005;
inline constexpr int kCityRows = 4;
inline constexpr int kCityCols = 4;

inline Polygon Rect(double lat0, double lon0, double dlat, double dlon) {
  return Polygon({{lat0, lon0}, {lat0, lon0 + dlon}, {lat0 + dlat, lon0 + dlon},
                  {lat0 + dlat, lon0}});
}

// persons per km^2, row-major from the south-west corner
inline double CityDensity(int row, int col) {
  static const double kTable[kCityRows][kCityCols] = {
      {2000, 4000, 6000, 3000},
      {8000, 16000, 12000, 5000},
      {4000, 12000, 10000, 7000},
      {1000, 3000, 5000, 2000},
  };
  return kTable[row][col];
}

inline std::string CityGroupId(int row, int col) {
  return "bg" + std::to_string(row) + std::to_string(col);
}

inline std::string CityGeoJson() {
  std::ostringstream o;
  o.precision(17);
  o << "{\"type\":\"FeatureCollection\",\"features\":[";
  bool first = true;
  for (int r = 0; r < kCityRows; ++r) {
    for (int c = 0; c < kCityCols; ++c) {
      const double lat0 = kCityLat + r * kCellDLat, lon0 = kCityLon + c * kCellDLon;
      const double lat1 = lat0 + kCellDLat, lon1 = lon0 + kCellDLon;
      const double t = CityDensity(r, c);
      // age mix shifts across the city so APDM differs from TPDM
      const double young = 0.15 + 0.05 * c, old = 0.10 + 0.05 * r;
      if (!first) o << ',';
      first = false;
      o << "{\"type\":\"Feature\",\"properties\":{\"id\":\"" << CityGroupId(r, c)
        << "\",\"total_density\":" << t << ",\"age_density\":{\"0-17\":" << t * young
        << ",\"18-64\":" << t * (1.0 - young - old) << ",\"65+\":" << t * old
        << "}},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[[" << lon0 << ','
        << lat0 << "],[" << lon1 << ',' << lat0 << "],[" << lon1 << ',' << lat1 << "],["
        << lon0 << ',' << lat1 << "],[" << lon0 << ',' << lat0 << "]]]}}";
    }
  }
  o << "]}";
  return o.str();
}

inline PopulationDataset City() { return ParsePopulation(CityGeoJson()); }

inline std::vector<TraceRecord> CityTraces(const PopulationDataset& city, uint64_t users,
                                           uint64_t hours, uint64_t n_infected,
                                           uint64_t seed) {
  SimConfig cfg;
  cfg.n_users = users;
  cfg.n_infected = n_infected;
  cfg.duration_hours = hours;
  cfg.seed = seed;
  cfg.world = &city;
  return GenerateTraces(cfg);
}

// `n` homes uniform over a square of side `side_m` centred on `center`.
inline ResidentialPoints UniformHomes(const GeoPoint& center, double side_m, size_t n,
                                      uint64_t seed) {
  const LocalFrame frame(center);
  Rng rng = SubstreamRng(seed, 0x686f6d6573ULL);
  ResidentialPoints out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const double x = (UniformUnit(rng) - 0.5) * side_m;
    const double y = (UniformUnit(rng) - 0.5) * side_m;
    out.push_back({"h" + std::to_string(i), frame.Unproject({x, y})});
  }
  return out;
}


class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("geomask_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string File(const std::string& name) const { return (path_ / name).string(); }

  std::string Write(const std::string& name, const std::string& content) const {
    const std::string p = File(name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace geomask::testing

#endif  // GEOMASK_TESTS_FIXTURES_H_
