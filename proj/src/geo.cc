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

#include "geomask/geo.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "geomask/error.h"

namespace geomask {

bool IsValid(const GeoPoint& p) {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) &&
         p.lat_deg >= -90.0 && p.lat_deg <= 90.0 && p.lon_deg >= -180.0 &&
         p.lon_deg <= 180.0;
}

GeoPoint MakeGeoPoint(double lat_deg, double lon_deg) {
  GeoPoint p{lat_deg, lon_deg};
  if (!IsValid(p)) {
    throw Error(ErrorCode::kInvalidArgument,
                "coordinate out of range: lat=" + std::to_string(lat_deg) +
                    " lon=" + std::to_string(lon_deg) +
                    " (lat must be in [-90,90], lon in [-180,180])");
  }
  return p;
}

double LocalXY::Norm() const { return std::hypot(x, y); }

double HaversineDistance(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = DegToRad(a.lat_deg);
  const double phi2 = DegToRad(b.lat_deg);
  const double dphi = phi2 - phi1;
  const double dlambda = DegToRad(b.lon_deg - a.lon_deg);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

LocalFrame::LocalFrame(const GeoPoint& origin)
    : origin_(MakeGeoPoint(origin.lat_deg, origin.lon_deg)),
      cos_lat_(std::cos(DegToRad(origin.lat_deg))) {}

bool LocalFrame::InFrame(const GeoPoint& p) const {
  return std::abs(p.lat_deg - origin_.lat_deg) <= kMaxExtentDeg &&
         std::abs(p.lon_deg - origin_.lon_deg) <= kMaxExtentDeg;
}

LocalXY LocalFrame::Project(const GeoPoint& p) const {
  if (!InFrame(p)) {
    throw Error(ErrorCode::kOutOfFrame,
                "point (" + std::to_string(p.lat_deg) + ", " +
                    std::to_string(p.lon_deg) + ") is more than 1 degree from "
                    "frame origin (" + std::to_string(origin_.lat_deg) + ", " +
                    std::to_string(origin_.lon_deg) + ")");
  }
  return {kEarthRadiusM * cos_lat_ * DegToRad(p.lon_deg - origin_.lon_deg),
          kEarthRadiusM * DegToRad(p.lat_deg - origin_.lat_deg)};
}

GeoPoint LocalFrame::Unproject(const LocalXY& xy) const {
  return {origin_.lat_deg + RadToDeg(xy.y / kEarthRadiusM),
          origin_.lon_deg + RadToDeg(xy.x / (kEarthRadiusM * cos_lat_))};
}

// ---------------------------------------------------------------------------
// Polygon

namespace {

constexpr double kBoundaryEps = 1e-12;

double Cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  return (a.lon_deg - o.lon_deg) * (b.lat_deg - o.lat_deg) -
         (a.lat_deg - o.lat_deg) * (b.lon_deg - o.lon_deg);
}

bool OnSegment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  if (std::abs(Cross(a, b, p)) > kBoundaryEps) return false;
  return p.lon_deg >= std::min(a.lon_deg, b.lon_deg) - kBoundaryEps &&
         p.lon_deg <= std::max(a.lon_deg, b.lon_deg) + kBoundaryEps &&
         p.lat_deg >= std::min(a.lat_deg, b.lat_deg) - kBoundaryEps &&
         p.lat_deg <= std::max(a.lat_deg, b.lat_deg) + kBoundaryEps;
}

int Sign(double v) { return (v > 0) - (v < 0); }

bool SegmentsIntersect(const GeoPoint& p1, const GeoPoint& p2,
                       const GeoPoint& q1, const GeoPoint& q2) {
  const int d1 = Sign(Cross(q1, q2, p1));
  const int d2 = Sign(Cross(q1, q2, p2));
  const int d3 = Sign(Cross(p1, p2, q1));
  const int d4 = Sign(Cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && OnSegment(q1, q2, p1)) return true;
  if (d2 == 0 && OnSegment(q1, q2, p2)) return true;
  if (d3 == 0 && OnSegment(p1, p2, q1)) return true;
  if (d4 == 0 && OnSegment(p1, p2, q2)) return true;
  return false;
}

void NormalizeRing(Polygon::Ring& ring, const char* what) {
  for (const auto& v : ring) {
    if (!IsValid(v)) {
      throw Error(ErrorCode::kInvalidPolygon,
                  std::string(what) + " has an out-of-range vertex");
    }
  }
  if (!ring.empty() && ring.front() != ring.back()) ring.push_back(ring.front());
  // Closed ring: n distinct vertices plus the repeat.
  if (ring.size() < 4) {
    throw Error(ErrorCode::kInvalidPolygon,
                std::string(what) + " needs at least 3 vertices");
  }
  const size_t n = ring.size() - 1;
  for (size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[i + 1]) {
      throw Error(ErrorCode::kInvalidPolygon,
                  std::string(what) + " has a repeated vertex");
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (SegmentsIntersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
        throw Error(ErrorCode::kInvalidPolygon,
                    std::string(what) + " is self-intersecting (edges " +
                        std::to_string(i) + " and " + std::to_string(j) + ")");
      }
    }
  }
}

bool RingOnBoundary(const Polygon::Ring& ring, const GeoPoint& p) {
  for (size_t i = 0; i + 1 < ring.size(); ++i) {
    if (OnSegment(ring[i], ring[i + 1], p)) return true;
  }
  return false;
}

// Even-odd ray casting toward +lon.
bool RingContains(const Polygon::Ring& ring, const GeoPoint& p) {
  bool inside = false;
  for (size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat_deg > p.lat_deg) != (b.lat_deg > p.lat_deg)) {
      const double lon_at = (b.lon_deg - a.lon_deg) * (p.lat_deg - a.lat_deg) /
                                (b.lat_deg - a.lat_deg) +
                            a.lon_deg;
      if (p.lon_deg < lon_at) inside = !inside;
    }
  }
  return inside;
}

double RingAreaM2(const Polygon::Ring& ring, const LocalFrame& frame) {
  double twice = 0.0;
  LocalXY prev = frame.Project(ring.front());
  for (size_t i = 1; i < ring.size(); ++i) {
    LocalXY cur = frame.Project(ring[i]);
    twice += prev.x * cur.y - cur.x * prev.y;
    prev = cur;
  }
  return std::abs(twice) / 2.0;
}

}  // namespace

Polygon::Polygon(Ring exterior, std::vector<Ring> holes)
    : exterior_(std::move(exterior)), holes_(std::move(holes)) {
  NormalizeRing(exterior_, "exterior ring");
  for (auto& h : holes_) NormalizeRing(h, "interior ring");
  min_ = max_ = exterior_.front();
  for (const auto& v : exterior_) {
    min_.lat_deg = std::min(min_.lat_deg, v.lat_deg);
    min_.lon_deg = std::min(min_.lon_deg, v.lon_deg);
    max_.lat_deg = std::max(max_.lat_deg, v.lat_deg);
    max_.lon_deg = std::max(max_.lon_deg, v.lon_deg);
  }
}

bool Polygon::OnBoundary(const GeoPoint& p) const {
  if (RingOnBoundary(exterior_, p)) return true;
  for (const auto& h : holes_) {
    if (RingOnBoundary(h, p)) return true;
  }
  return false;
}

bool Polygon::Contains(const GeoPoint& p) const {
  if (!BoxContains(min_, max_, p)) return false;
  if (OnBoundary(p)) return true;
  if (!RingContains(exterior_, p)) return false;
  for (const auto& h : holes_) {
    if (RingContains(h, p)) return false;
  }
  return true;
}

bool Polygon::ContainsStrictly(const GeoPoint& p) const {
  return Contains(p) && !OnBoundary(p);
}

double Polygon::AreaM2() const {
  LocalFrame frame({(min_.lat_deg + max_.lat_deg) / 2.0,
                    (min_.lon_deg + max_.lon_deg) / 2.0});
  double area = RingAreaM2(exterior_, frame);
  for (const auto& h : holes_) area -= RingAreaM2(h, frame);
  return area;
}

bool BoxContains(const GeoPoint& min_corner, const GeoPoint& max_corner,
                 const GeoPoint& p) {
  return p.lat_deg >= min_corner.lat_deg && p.lat_deg <= max_corner.lat_deg &&
         p.lon_deg >= min_corner.lon_deg && p.lon_deg <= max_corner.lon_deg;
}

// ---------------------------------------------------------------------------
// PointIndex

QueryBox ConservativeBox(const GeoPoint& center, double radius_m) {
  // Relative and absolute slack keep the box a strict superset despite
  // rounding in HaversineDistance.
  const double ang = radius_m / kEarthRadiusM * (1.0 + 1e-9) + 1e-12;
  const double dlat = RadToDeg(ang) + 1e-9;
  QueryBox box{center.lat_deg - dlat, center.lat_deg + dlat, 0.0, 0.0, false};
  const double phi = DegToRad(center.lat_deg);
  if (std::abs(center.lat_deg) + RadToDeg(ang) >= 89.999 || ang >= kPi / 2) {
    box.all_longitudes = true;
    box.min_lon = -180.0;
    box.max_lon = 180.0;
    return box;
  }
  const double s = std::sin(ang) / std::cos(phi);
  const double dlon = RadToDeg(std::asin(std::min(1.0, s))) * (1.0 + 1e-9) + 1e-9;
  box.min_lon = center.lon_deg - dlon;
  box.max_lon = center.lon_deg + dlon;
  if (box.min_lon < -180.0 || box.max_lon > 180.0) {
    // Wrapping queries fall back to a full longitude scan.
    box.all_longitudes = true;
    box.min_lon = -180.0;
    box.max_lon = 180.0;
  }
  return box;
}

namespace {

bool InBox(const QueryBox& box, const GeoPoint& p) {
  return p.lat_deg >= box.min_lat && p.lat_deg <= box.max_lat &&
         p.lon_deg >= box.min_lon && p.lon_deg <= box.max_lon;
}

}  // namespace

class PointIndex::Backend {
 public:
  virtual ~Backend() = default;
  // Calls visit(position) for a superset of the points inside box.
  virtual void Candidates(const QueryBox& box,
                          const std::function<void(size_t)>& visit) const = 0;
};

namespace {

class GridBackend final : public PointIndex::Backend {
 public:
  GridBackend(std::span<const IndexedPoint> points, double cell_size_m) {
    if (points.empty()) return;
    min_lat_ = min_lon_ = std::numeric_limits<double>::infinity();
    double max_lat = -min_lat_, max_lon = -min_lon_;
    for (const auto& p : points) {
      min_lat_ = std::min(min_lat_, p.point.lat_deg);
      min_lon_ = std::min(min_lon_, p.point.lon_deg);
      max_lat = std::max(max_lat, p.point.lat_deg);
      max_lon = std::max(max_lon, p.point.lon_deg);
    }
    const double max_abs_lat =
        std::min(89.0, std::max(std::abs(min_lat_), std::abs(max_lat)));
    cell_lat_ = RadToDeg(cell_size_m / kEarthRadiusM);
    cell_lon_ = cell_lat_ / std::cos(DegToRad(max_abs_lat));
    rows_ = static_cast<size_t>((max_lat - min_lat_) / cell_lat_) + 1;
    cols_ = static_cast<size_t>((max_lon - min_lon_) / cell_lon_) + 1;
    // Bound the table size for sparse, wide data sets.
    const size_t max_cells = std::max<size_t>(16, points.size() * 4);
    while (rows_ * cols_ > max_cells) {
      cell_lat_ *= 2.0;
      cell_lon_ *= 2.0;
      rows_ = static_cast<size_t>((max_lat - min_lat_) / cell_lat_) + 1;
      cols_ = static_cast<size_t>((max_lon - min_lon_) / cell_lon_) + 1;
    }
    offsets_.assign(rows_ * cols_ + 1, 0);
    std::vector<size_t> cell_of(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
      cell_of[i] = CellOf(points[i].point);
      ++offsets_[cell_of[i] + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    entries_.resize(points.size());
    std::vector<size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (size_t i = 0; i < points.size(); ++i) entries_[fill[cell_of[i]]++] = i;
  }

  size_t MaxCellOccupancy() const {
    size_t m = 0;
    for (size_t c = 0; c + 1 < offsets_.size(); ++c) {
      m = std::max(m, offsets_[c + 1] - offsets_[c]);
    }
    return m;
  }
  size_t NonEmptyCells() const {
    size_t n = 0;
    for (size_t c = 0; c + 1 < offsets_.size(); ++c) {
      n += offsets_[c + 1] > offsets_[c];
    }
    return n;
  }

  void Candidates(const QueryBox& box,
                  const std::function<void(size_t)>& visit) const override {
    if (entries_.empty()) return;
    const long r0 = Clamp((box.min_lat - min_lat_) / cell_lat_, rows_);
    const long r1 = Clamp((box.max_lat - min_lat_) / cell_lat_, rows_);
    const long c0 = Clamp((box.min_lon - min_lon_) / cell_lon_, cols_);
    const long c1 = Clamp((box.max_lon - min_lon_) / cell_lon_, cols_);
    if (box.max_lat < min_lat_ || box.max_lon < min_lon_) return;
    for (long r = r0; r <= r1; ++r) {
      for (long c = c0; c <= c1; ++c) {
        const size_t cell = static_cast<size_t>(r) * cols_ + static_cast<size_t>(c);
        for (size_t k = offsets_[cell]; k < offsets_[cell + 1]; ++k) {
          visit(entries_[k]);
        }
      }
    }
  }

 private:
  static long Clamp(double v, size_t n) {
    if (!(v > 0)) return 0;
    if (v >= static_cast<double>(n - 1)) return static_cast<long>(n - 1);
    return static_cast<long>(v);
  }

  size_t CellOf(const GeoPoint& p) const {
    const size_t r = static_cast<size_t>(Clamp((p.lat_deg - min_lat_) / cell_lat_, rows_));
    const size_t c = static_cast<size_t>(Clamp((p.lon_deg - min_lon_) / cell_lon_, cols_));
    return r * cols_ + c;
  }

  double min_lat_ = 0.0, min_lon_ = 0.0;
  double cell_lat_ = 1.0, cell_lon_ = 1.0;
  size_t rows_ = 0, cols_ = 0;
  std::vector<size_t> offsets_;
  std::vector<size_t> entries_;
};

class KdTreeBackend final : public PointIndex::Backend {
 public:
  static constexpr size_t kLeafSize = 16;

  explicit KdTreeBackend(std::span<const IndexedPoint> points) : points_(points) {
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), size_t{0});
    if (!order_.empty()) root_ = BuildNode(0, order_.size(), 0);
  }

  void Candidates(const QueryBox& box,
                  const std::function<void(size_t)>& visit) const override {
    if (root_ < 0) return;
    Visit(root_, box, visit);
  }

 private:
  struct Node {
    size_t begin, end;
    double min_lat, max_lat, min_lon, max_lon;
    int left = -1, right = -1;
  };

  int BuildNode(size_t begin, size_t end, int depth) {
    Node node{begin, end, 90.0, -90.0, 180.0, -180.0};
    for (size_t i = begin; i < end; ++i) {
      const GeoPoint& p = points_[order_[i]].point;
      node.min_lat = std::min(node.min_lat, p.lat_deg);
      node.max_lat = std::max(node.max_lat, p.lat_deg);
      node.min_lon = std::min(node.min_lon, p.lon_deg);
      node.max_lon = std::max(node.max_lon, p.lon_deg);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin > kLeafSize) {
      const bool by_lat = (depth % 2) == 0;
      const size_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid,
                       order_.begin() + end, [&](size_t a, size_t b) {
                         const GeoPoint& pa = points_[a].point;
                         const GeoPoint& pb = points_[b].point;
                         return by_lat ? pa.lat_deg < pb.lat_deg
                                       : pa.lon_deg < pb.lon_deg;
                       });
      const int left = BuildNode(begin, mid, depth + 1);
      const int right = BuildNode(mid, end, depth + 1);
      nodes_[id].left = left;
      nodes_[id].right = right;
    }
    return id;
  }

  void Visit(int id, const QueryBox& box,
             const std::function<void(size_t)>& visit) const {
    const Node& n = nodes_[id];
    if (n.max_lat < box.min_lat || n.min_lat > box.max_lat ||
        n.max_lon < box.min_lon || n.min_lon > box.max_lon) {
      return;
    }
    if (n.left < 0) {
      for (size_t i = n.begin; i < n.end; ++i) visit(order_[i]);
      return;
    }
    Visit(n.left, box, visit);
    Visit(n.right, box, visit);
  }

  std::span<const IndexedPoint> points_;
  std::vector<size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

double AutoCellSize(std::span<const IndexedPoint> points) {
  if (points.size() < 2) return 1000.0;
  GeoPoint lo = points.front().point, hi = lo;
  for (const auto& p : points) {
    lo.lat_deg = std::min(lo.lat_deg, p.point.lat_deg);
    lo.lon_deg = std::min(lo.lon_deg, p.point.lon_deg);
    hi.lat_deg = std::max(hi.lat_deg, p.point.lat_deg);
    hi.lon_deg = std::max(hi.lon_deg, p.point.lon_deg);
  }
  const double h = HaversineDistance(lo, {hi.lat_deg, lo.lon_deg});
  const double w = HaversineDistance(lo, {lo.lat_deg, hi.lon_deg});
  // About four points per cell under a uniform spread.
  const double cell = std::sqrt(std::max(h * w, 1.0) * 4.0 /
                                static_cast<double>(points.size()));
  return std::max(cell, 1.0);
}

}  // namespace

PointIndex::PointIndex(std::vector<IndexedPoint> points, IndexStrategy strategy,
                       std::unique_ptr<Backend> backend)
    : points_(std::move(points)), strategy_(strategy), backend_(std::move(backend)) {}

PointIndex::PointIndex(PointIndex&&) noexcept = default;
PointIndex& PointIndex::operator=(PointIndex&&) noexcept = default;
PointIndex::~PointIndex() = default;

PointIndex PointIndex::Build(std::vector<IndexedPoint> points,
                             const PointIndexOptions& options) {
  std::unordered_set<std::string> seen;
  seen.reserve(points.size());
  for (const auto& p : points) {
    if (!IsValid(p.point)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid point for id " + p.id);
    }
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate point id: " + p.id);
    }
  }
  // The backend keeps a span into the vector; construct the index first so
  // the storage does not move afterwards.
  PointIndex index(std::move(points), IndexStrategy::kGrid, nullptr);
  std::span<const IndexedPoint> view = index.points_;
  const double cell = options.cell_size_m > 0 ? options.cell_size_m
                                               : AutoCellSize(view);
  switch (options.strategy) {
    case IndexStrategy::kKdTree:
      index.strategy_ = IndexStrategy::kKdTree;
      index.backend_ = std::make_unique<KdTreeBackend>(view);
      break;
    case IndexStrategy::kGrid:
      index.backend_ = std::make_unique<GridBackend>(view, cell);
      break;
    case IndexStrategy::kAuto: {
      auto grid = std::make_unique<GridBackend>(view, cell);
      const size_t nonempty = std::max<size_t>(1, grid->NonEmptyCells());
      const double mean = static_cast<double>(view.size()) / nonempty;
      // Heavily clustered data degrades grid scans; switch to the tree.
      if (view.size() > 1000 && grid->MaxCellOccupancy() > 64.0 * std::max(1.0, mean)) {
        index.strategy_ = IndexStrategy::kKdTree;
        index.backend_ = std::make_unique<KdTreeBackend>(view);
      } else {
        index.backend_ = std::move(grid);
      }
      break;
    }
  }
  return index;
}

size_t PointIndex::CountWithinRadius(const GeoPoint& center, double radius_m) const {
  if (!(radius_m >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be >= 0");
  }
  const QueryBox box = ConservativeBox(center, radius_m);
  size_t count = 0;
  backend_->Candidates(box, [&](size_t i) {
    const GeoPoint& p = points_[i].point;
    if (InBox(box, p) && HaversineDistance(center, p) <= radius_m) ++count;
  });
  return count;
}

std::vector<size_t> PointIndex::CollectWithinRadius(const GeoPoint& center,
                                                    double radius_m) const {
  if (!(radius_m >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be >= 0");
  }
  const QueryBox box = ConservativeBox(center, radius_m);
  std::vector<size_t> out;
  backend_->Candidates(box, [&](size_t i) {
    const GeoPoint& p = points_[i].point;
    if (InBox(box, p) && HaversineDistance(center, p) <= radius_m) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace geomask
