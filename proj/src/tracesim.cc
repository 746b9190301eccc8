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

#include "geomask/tracesim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <unordered_map>

#include "geomask/error.h"
#include "geomask/rng.h"

namespace geomask {

void SimConfig::Validate() const {
  if (world == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "simulation needs a population world");
  }
  if (n_infected > n_users) {
    throw Error(ErrorCode::kInvalidArgument,
                "n_infected (" + std::to_string(n_infected) + ") must be <= n_users (" +
                    std::to_string(n_users) + ")");
  }
  if (step_minutes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "step_minutes must be >= 1");
  }
  if (!(speed_mps >= 0.0) || !std::isfinite(speed_mps)) {
    throw Error(ErrorCode::kInvalidArgument, "speed must be >= 0 m/s");
  }
}

std::string SimUserId(uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%05llu", static_cast<unsigned long long>(index));
  return buf;
}

std::set<std::string> InfectedUsers(const SimConfig& cfg) {
  std::set<std::string> out;
  for (uint64_t i = 0; i < cfg.n_infected && i < cfg.n_users; ++i) out.insert(SimUserId(i));
  return out;
}

namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 ToVec(const GeoPoint& p) {
  const double phi = DegToRad(p.lat_deg), lam = DegToRad(p.lon_deg);
  return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

GeoPoint FromVec(const Vec3& v) {
  const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  return {RadToDeg(std::asin(std::clamp(v.z / n, -1.0, 1.0))), RadToDeg(std::atan2(v.y, v.x))};
}

// Point a fraction f of the way from a to b along the great circle.
GeoPoint Interpolate(const GeoPoint& a, const GeoPoint& b, double f) {
  const Vec3 va = ToVec(a), vb = ToVec(b);
  const double dot = std::clamp(va.x * vb.x + va.y * vb.y + va.z * vb.z, -1.0, 1.0);
  const double delta = std::acos(dot);
  if (delta < 1e-15) return a;
  const double s = std::sin(delta);
  const double wa = std::sin((1.0 - f) * delta) / s;
  const double wb = std::sin(f * delta) / s;
  return FromVec({wa * va.x + wb * vb.x, wa * va.y + wb * vb.y, wa * va.z + wb * vb.z});
}

class WaypointSampler {
 public:
  explicit WaypointSampler(const PopulationDataset& world) : world_(world) {
    double total = 0.0;
    for (const auto& g : world.groups()) {
      total += g.total_density();
      cumulative_.push_back(total);
    }
  }

  GeoPoint Draw(Rng& rng) const {
    const double u = UniformUnit(rng) * cumulative_.back();
    size_t gi = static_cast<size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    gi = std::min(gi, cumulative_.size() - 1);
    const BlockGroup& g = world_.groups()[gi];
    const GeoPoint lo = g.min_corner(), hi = g.max_corner();
    for (uint64_t attempt = 0; attempt < kMaxRejectionDraws; ++attempt) {
      const GeoPoint p{lo.lat_deg + UniformUnit(rng) * (hi.lat_deg - lo.lat_deg),
                       lo.lon_deg + UniformUnit(rng) * (hi.lon_deg - lo.lon_deg)};
      if (g.Contains(p)) return p;
    }
    throw Error(ErrorCode::kRejectionBudgetExceeded,
                "could not draw a waypoint inside block group " + g.id());
  }

 private:
  const PopulationDataset& world_;
  std::vector<double> cumulative_;
};

}  // namespace

std::vector<TraceRecord> GenerateTraces(const SimConfig& cfg) {
  cfg.Validate();
  const uint64_t steps = cfg.duration_hours * 60 / cfg.step_minutes;
  const double step_s = static_cast<double>(cfg.step_minutes) * 60.0;
  const double step_len = cfg.speed_mps * step_s;
  const WaypointSampler sampler(*cfg.world);

  std::vector<TraceRecord> out;
  out.reserve(cfg.n_users * steps);
  for (uint64_t u = 0; u < cfg.n_users; ++u) {
    const std::string id = SimUserId(u);
    Rng rng = SubstreamRng(cfg.seed, StableHash(id));
    GeoPoint pos = sampler.Draw(rng);
    GeoPoint target = sampler.Draw(rng);
    for (uint64_t i = 0; i < steps; ++i) {
      const Timestamp t = cfg.start + std::chrono::seconds{
                                          static_cast<int64_t>(i * cfg.step_minutes * 60)};
      out.push_back({id, t, pos});
      const double d = HaversineDistance(pos, target);
      if (d <= step_len) {
        // Arrive and wait out the rest of the step.
        pos = target;
        target = sampler.Draw(rng);
      } else {
        pos = Interpolate(pos, target, step_len / d);
      }
    }
  }
  return out;
}

void ExposureParams::Validate() const {
  if (!(d_max_m > 0.0) || !std::isfinite(d_max_m)) {
    throw Error(ErrorCode::kInvalidArgument,
                "d_max must be > 0 m, got " + std::to_string(d_max_m));
  }
  if (t_window_s < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "t_window must be >= 0 s, got " + std::to_string(t_window_s));
  }
}

int64_t TimeBucket(Timestamp t, int64_t t_window_s) {
  const int64_t s = t.time_since_epoch().count();
  if (t_window_s <= 0) return s;
  return s >= 0 ? s / t_window_s : -((-s + t_window_s - 1) / t_window_s);
}

namespace {

struct CellHashKey {
  int64_t slot, ilat, ilon;
  bool operator==(const CellHashKey&) const = default;
};

struct CellHash {
  size_t operator()(const CellHashKey& k) const {
    uint64_t h = SplitMix64(static_cast<uint64_t>(k.slot));
    h = SplitMix64(h ^ static_cast<uint64_t>(k.ilat));
    return SplitMix64(h ^ static_cast<uint64_t>(k.ilon));
  }
};

int64_t FloorDiv(int64_t a, int64_t b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

}  // namespace

std::vector<ExposureEvent> DetectExposures(const std::vector<TraceRecord>& records,
                                           const std::set<std::string>& infected,
                                           const ExposureParams& params) {
  params.Validate();
  if (infected.empty() || records.empty()) return {};

  const int64_t slot_s = std::max<int64_t>(params.t_window_s, 1);
  double max_abs_lat = 0.0;
  for (const auto& r : records) max_abs_lat = std::max(max_abs_lat, std::abs(r.point.lat_deg));
  max_abs_lat = std::min(max_abs_lat, 89.0);
  // Slightly oversized cells make the 3x3 neighbourhood a superset.
  const double cell_lat = RadToDeg(params.d_max_m / kEarthRadiusM) * 1.001 + 1e-12;
  const double cell_lon = cell_lat / std::cos(DegToRad(max_abs_lat)) * 1.001;

  auto key_of = [&](const TraceRecord& r) {
    return CellHashKey{FloorDiv(r.timestamp.time_since_epoch().count(), slot_s),
                       static_cast<int64_t>(std::floor(r.point.lat_deg / cell_lat)),
                       static_cast<int64_t>(std::floor(r.point.lon_deg / cell_lon))};
  };

  std::unordered_map<CellHashKey, std::vector<uint32_t>, CellHash> grid;
  grid.reserve(records.size());
  for (uint32_t i = 0; i < records.size(); ++i) grid[key_of(records[i])].push_back(i);

  struct Best {
    Timestamp t_infected, t_contact;
    double distance;
  };
  using EventKey = std::tuple<std::string, std::string, int64_t>;
  std::map<EventKey, Best> best;

  for (const auto& inf : records) {
    if (!infected.count(inf.user_id)) continue;
    const CellHashKey k = key_of(inf);
    const int64_t bucket = TimeBucket(inf.timestamp, params.t_window_s);
    for (int64_t ds = -1; ds <= 1; ++ds) {
      for (int64_t dlat = -1; dlat <= 1; ++dlat) {
        for (int64_t dlon = -1; dlon <= 1; ++dlon) {
          auto it = grid.find({k.slot + ds, k.ilat + dlat, k.ilon + dlon});
          if (it == grid.end()) continue;
          for (uint32_t j : it->second) {
            const TraceRecord& other = records[j];
            if (other.user_id == inf.user_id) continue;
            const auto dt = (other.timestamp - inf.timestamp).count();
            if (std::abs(dt) > params.t_window_s) continue;
            const double dist = HaversineDistance(inf.point, other.point);
            if (dist > params.d_max_m) continue;
            const Best candidate{inf.timestamp, other.timestamp, dist};
            auto [pos, inserted] =
                best.emplace(EventKey{inf.user_id, other.user_id, bucket}, candidate);
            if (!inserted) {
              const Best& cur = pos->second;
              if (std::tie(candidate.t_infected, candidate.distance, candidate.t_contact) <
                  std::tie(cur.t_infected, cur.distance, cur.t_contact)) {
                pos->second = candidate;
              }
            }
          }
        }
      }
    }
  }

  std::vector<ExposureEvent> events;
  events.reserve(best.size());
  for (const auto& [key, b] : best) {
    events.push_back({std::get<0>(key), std::get<1>(key), b.t_infected, b.distance,
                      std::get<2>(key)});
  }
  return events;
}

UtilityMetrics Utility(const std::vector<ExposureEvent>& truth,
                       const std::vector<ExposureEvent>& detected) {
  using Key = std::tuple<std::string, std::string, int64_t>;
  std::set<Key> truth_keys, detected_keys;
  for (const auto& e : truth) truth_keys.insert({e.infected_id, e.contact_id, e.bucket});
  for (const auto& e : detected) detected_keys.insert({e.infected_id, e.contact_id, e.bucket});
  UtilityMetrics m;
  m.true_events = truth_keys.size();
  m.detected_events = detected_keys.size();
  for (const auto& k : detected_keys) m.matched_events += truth_keys.count(k);
  if (m.detected_events == 0) {
    m.precision = m.true_events == 0 ? 1.0 : 0.0;
  } else {
    m.precision = static_cast<double>(m.matched_events) / static_cast<double>(m.detected_events);
  }
  m.recall = m.true_events == 0
                 ? 1.0
                 : static_cast<double>(m.matched_events) / static_cast<double>(m.true_events);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

std::vector<TraceRecord> MaskedTraces(const std::vector<MaskedRecord>& masked) {
  std::vector<TraceRecord> out;
  out.reserve(masked.size());
  for (const auto& m : masked) {
    out.push_back({m.original.user_id, m.original.timestamp, m.masked_point});
  }
  return out;
}

std::vector<SweepRow> TradeoffSweep(const std::vector<TraceRecord>& records,
                                    const PointIndex& homes, const SweepRequest& request) {
  if (request.grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
  }
  if (homes.size() == 0) {
    throw Error(ErrorCode::kNoResidentialData, "sweep needs residential points");
  }
  const auto truth = DetectExposures(records, request.infected, request.exposure);

  std::vector<SweepRow> rows;
  for (double value : request.grid) {
    MaskRequest mask;
    mask.mechanism = request.mechanism;
    mask.gaussian = request.gaussian;
    mask.geoind = request.geoind;
    mask.population = request.population;
    mask.age_brackets = request.age_brackets;
    mask.seed = request.seed;
    if (request.mechanism == Mechanism::kGaussianSkew) {
      mask.gaussian.c_m = value;
    } else if (request.mechanism == Mechanism::kPlanarLaplace) {
      mask.geoind.epsilon_per_m = value;
    }
    const MaskResult masked = MaskDataset(records, mask);

    std::vector<MaskedRecord> subset;
    const size_t n = masked.records.size();
    const size_t stride = (request.max_eval_points == 0 || n <= request.max_eval_points)
                              ? 1
                              : (n + request.max_eval_points - 1) / request.max_eval_points;
    for (size_t i = 0; i < n; i += stride) subset.push_back(masked.records[i]);
    const EvalOptions eval{request.coverage, request.k_target};
    std::vector<KAnonResult> ks;
    ks.reserve(subset.size());
    for (const auto& r : subset) ks.push_back(KAnonymity(r, homes, BufferRadiusFor(r, eval.coverage)));
    const EvalSummary summary = Summarize(subset, ks, eval);

    const auto detected =
        DetectExposures(MaskedTraces(masked.records), request.infected, request.exposure);
    const UtilityMetrics u = Utility(truth, detected);

    double disp = 0.0;
    for (const auto& r : masked.records) disp += r.DisplacementMeters();
    rows.push_back({value, summary.median_k, summary.fraction_k_ge_target, u.precision,
                    u.recall, u.f1, n ? disp / static_cast<double>(n) : 0.0});
  }
  return rows;
}

}  // namespace geomask
