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

#ifndef GEOMASK_GEO_H_
#define GEOMASK_GEO_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace geomask {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

constexpr double DegToRad(double deg) { return deg * kPi / 180.0; }
constexpr double RadToDeg(double rad) { return rad * 180.0 / kPi; }

// WGS84 latitude/longitude in degrees.
struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool IsValid(const GeoPoint& p);

// Throws Error(kInvalidArgument) when the point is out of range or not finite.
GeoPoint MakeGeoPoint(double lat_deg, double lon_deg);

// Planar offset in meters relative to a LocalFrame origin.
struct LocalXY {
  double x = 0.0;  // east
  double y = 0.0;  // north

  double Norm() const;
};

// Great-circle distance on a sphere of radius kEarthRadiusM.
double HaversineDistance(const GeoPoint& a, const GeoPoint& b);

// Equirectangular projection around a fixed origin. Only valid within one
// degree of the origin in both axes; Project() rejects anything further.
class LocalFrame {
 public:
  static constexpr double kMaxExtentDeg = 1.0;

  explicit LocalFrame(const GeoPoint& origin);

  const GeoPoint& origin() const { return origin_; }

  LocalXY Project(const GeoPoint& p) const;
  GeoPoint Unproject(const LocalXY& xy) const;

  bool InFrame(const GeoPoint& p) const;

 private:
  GeoPoint origin_;
  double cos_lat_;
};

// Polygon with an exterior ring and optional holes. Rings are stored closed
// (first vertex repeated at the end).
class Polygon {
 public:
  using Ring = std::vector<GeoPoint>;

  // Closes open rings and validates vertex count, coordinates and
  // self-intersection. Throws Error(kInvalidPolygon).
  explicit Polygon(Ring exterior, std::vector<Ring> holes = {});

  const Ring& exterior() const { return exterior_; }
  const std::vector<Ring>& holes() const { return holes_; }

  // Boundary points count as inside.
  bool Contains(const GeoPoint& p) const;
  // True when inside and not on any ring edge.
  bool ContainsStrictly(const GeoPoint& p) const;
  bool OnBoundary(const GeoPoint& p) const;

  // Area in square meters on the local projection about the bounding-box
  // center (holes subtracted).
  double AreaM2() const;

  GeoPoint min_corner() const { return min_; }
  GeoPoint max_corner() const { return max_; }

 private:
  Ring exterior_;
  std::vector<Ring> holes_;
  GeoPoint min_;
  GeoPoint max_;
};

// Bounding-box overlap test in degrees.
bool BoxContains(const GeoPoint& min_corner, const GeoPoint& max_corner,
                 const GeoPoint& p);

struct IndexedPoint {
  std::string id;
  GeoPoint point;
};

enum class IndexStrategy { kAuto, kGrid, kKdTree };

struct PointIndexOptions {
  IndexStrategy strategy = IndexStrategy::kAuto;
  // Grid cell edge; 0 picks one from the data extent and point count.
  double cell_size_m = 0.0;
};

// Immutable index answering inclusive radius queries under haversine
// distance. Candidates come from a conservative lat/lon box, so the results
// are identical to a linear scan.
class PointIndex {
 public:
  // Throws Error(kDuplicateId) on repeated ids.
  static PointIndex Build(std::vector<IndexedPoint> points,
                          const PointIndexOptions& options = {});

  PointIndex(PointIndex&&) noexcept;
  PointIndex& operator=(PointIndex&&) noexcept;
  ~PointIndex();

  size_t size() const { return points_.size(); }
  std::span<const IndexedPoint> points() const { return points_; }
  IndexStrategy strategy() const { return strategy_; }

  size_t CountWithinRadius(const GeoPoint& center, double radius_m) const;
  // Positions into points(), ascending.
  std::vector<size_t> CollectWithinRadius(const GeoPoint& center,
                                          double radius_m) const;

  class Backend;

 private:
  PointIndex(std::vector<IndexedPoint> points, IndexStrategy strategy,
             std::unique_ptr<Backend> backend);

  std::vector<IndexedPoint> points_;
  IndexStrategy strategy_;
  std::unique_ptr<Backend> backend_;
};

// Degree-space box that contains every point within radius_m of center.
struct QueryBox {
  double min_lat, max_lat, min_lon, max_lon;
  bool all_longitudes;
};
QueryBox ConservativeBox(const GeoPoint& center, double radius_m);

}  // namespace geomask

#endif  // GEOMASK_GEO_H_
