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

#include "geomask/mask.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "geomask/error.h"

namespace geomask {

double AgeDensityMultiplier(double dataset_age_density, double group_age_density) {
  if (!(dataset_age_density > 0.0) || !(group_age_density > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDensity,
                "APDM needs AGPD > 0 and UBGAD > 0 (got AGPD=" +
                    std::to_string(dataset_age_density) +
                    ", UBGAD=" + std::to_string(group_age_density) + ")");
  }
  return dataset_age_density / group_age_density;
}

double TotalDensityMultiplier(double dataset_total_density, double group_total_density) {
  if (!(dataset_total_density > 0.0) || !(group_total_density > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDensity,
                "TPDM needs ATPD > 0 and UBGPD > 0 (got ATPD=" +
                    std::to_string(dataset_total_density) +
                    ", UBGPD=" + std::to_string(group_total_density) + ")");
  }
  return dataset_total_density / group_total_density;
}

double CombinedMultiplier(double age_weight, double apdm, double tpdm) {
  if (!(age_weight >= 0.0 && age_weight <= 1.0)) {
    throw Error(ErrorCode::kAmOutOfRange,
                "AM must be in [0, 1], got " + std::to_string(age_weight));
  }
  return age_weight * apdm + (1.0 - age_weight) * tpdm;
}

void MaskConfig::Validate() const {
  if (!(c_m > 0.0) || !std::isfinite(c_m)) {
    throw Error(ErrorCode::kInvalidArgument, "c must be > 0 m, got " + std::to_string(c_m));
  }
  if (!(age_weight >= 0.0 && age_weight <= 1.0)) {
    throw Error(ErrorCode::kAmOutOfRange,
                "AM must be in [0, 1], got " + std::to_string(age_weight));
  }
  if (!(min_displacement_m >= 0.0) || !std::isfinite(min_displacement_m)) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_displacement must be >= 0 m, got " + std::to_string(min_displacement_m));
  }
}

void GeoIndConfig::Validate() const {
  if (!(epsilon_per_m > 0.0) || !std::isfinite(epsilon_per_m)) {
    throw Error(ErrorCode::kInvalidArgument,
                "epsilon must be > 0 per m, got " + std::to_string(epsilon_per_m));
  }
  if (!(nominal_radius_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "nominal radius must be > 0 m, got " + std::to_string(nominal_radius_m));
  }
}

SigmaResult EffectiveSigma(const MaskConfig& cfg, const BlockGroup& group,
                           const PopulationDataset& pop,
                           const std::optional<std::string>& bracket) {
  cfg.Validate();
  SigmaResult out;
  Multipliers& m = out.multipliers;
  m.tpdm = TotalDensityMultiplier(pop.average_total_density(), group.total_density());
  if (bracket) {
    m.apdm = AgeDensityMultiplier(pop.average_age_density(*bracket),
                                  group.age_density(*bracket));
    m.age_weight = cfg.age_weight;
    m.cm = CombinedMultiplier(cfg.age_weight, *m.apdm, m.tpdm);
  } else {
    m.age_weight = 0.0;
    m.cm = m.tpdm;
  }
  out.sigma_m = cfg.c_m * m.cm;
  return out;
}

namespace {

GeoPoint Offset(const GeoPoint& p, const LocalXY& d) {
  // A frame centered on the point itself keeps the offset exact at the
  // origin and avoids the 1-degree projection limit.
  const double cos_lat = std::cos(DegToRad(p.lat_deg));
  GeoPoint out{p.lat_deg + RadToDeg(d.y / kEarthRadiusM),
               p.lon_deg + RadToDeg(d.x / (kEarthRadiusM * std::max(cos_lat, 1e-12)))};
  out.lat_deg = std::clamp(out.lat_deg, -90.0, 90.0);
  if (out.lon_deg > 180.0) out.lon_deg -= 360.0;
  if (out.lon_deg < -180.0) out.lon_deg += 360.0;
  return out;
}

}  // namespace

Displaced GaussianSkew(const GeoPoint& p, double sigma_m, double min_displacement_m,
                       Rng& rng) {
  if (!(sigma_m > 0.0) || !std::isfinite(sigma_m)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sigma_eff must be > 0, got " + std::to_string(sigma_m));
  }
  std::normal_distribution<double> normal(0.0, sigma_m);
  for (uint64_t draw = 0; draw < kMaxRejectionDraws; ++draw) {
    LocalXY d{normal(rng), normal(rng)};
    if (d.Norm() >= min_displacement_m) return {Offset(p, d), d};
  }
  throw Error(ErrorCode::kRejectionBudgetExceeded,
              "no draw reached min_displacement " + std::to_string(min_displacement_m) +
                  " m with sigma " + std::to_string(sigma_m) + " m");
}

double LambertWm1(double x) {
  constexpr double kE = 2.71828182845904523536;
  constexpr double kBranch = -1.0 / kE;
  if (!(x >= kBranch) || !(x < 0.0)) {
    if (x < kBranch && x > kBranch - 1e-15) return -1.0;
    throw Error(ErrorCode::kInvalidArgument,
                "LambertWm1 domain is [-1/e, 0), got " + std::to_string(x));
  }
  if (x == kBranch) return -1.0;

  double w;
  if (x < -0.25) {
    // Series about the branch point.
    const double q = -std::sqrt(2.0 * std::max(0.0, 1.0 + kE * x));
    w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (w > -1.0) w = -1.0;  // stay on the lower branch
    if (std::abs(step) <= 1e-15 * std::abs(w)) break;
  }
  return w;
}

double PlanarLaplaceInverseCdf(double epsilon_per_m, double p) {
  if (!(epsilon_per_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "inverse CDF probability must be in [0, 1), got " + std::to_string(p));
  }
  if (p == 0.0) return 0.0;
  constexpr double kE = 2.71828182845904523536;
  const double w = LambertWm1((p - 1.0) / kE);
  return std::max(0.0, -(w + 1.0) / epsilon_per_m);
}

double PlanarLaplaceCdf(double epsilon_per_m, double r) {
  if (r <= 0.0) return 0.0;
  const double er = epsilon_per_m * r;
  return 1.0 - (1.0 + er) * std::exp(-er);
}

Displaced PlanarLaplace(const GeoPoint& p, const GeoIndConfig& cfg, Rng& rng) {
  cfg.Validate();
  const double theta = 2.0 * kPi * UniformUnit(rng);
  const double radius = PlanarLaplaceInverseCdf(cfg.epsilon_per_m, UniformUnit(rng));
  const LocalXY d{radius * std::cos(theta), radius * std::sin(theta)};
  return {Offset(p, d), d};
}

RedactionResult Redact(const std::vector<TraceRecord>& records, const ZoneSet& zones,
                       const std::set<std::string>& revoked_users) {
  std::vector<const Zone*> private_zones;
  for (const auto& z : zones.zones) {
    if (z.label == ZoneLabel::kPrivate) private_zones.push_back(&z);
  }
  RedactionResult out;
  for (size_t i = 0; i < records.size(); ++i) {
    const TraceRecord& r = records[i];
    if (revoked_users.count(r.user_id)) {
      ++out.report.by_user[r.user_id];
      ++out.report.total_removed;
      continue;
    }
    const Zone* hit = nullptr;
    for (const Zone* z : private_zones) {
      if (z->Contains(r.point)) {
        hit = z;
        break;
      }
    }
    if (hit) {
      ++out.report.by_zone[hit->id];
      ++out.report.total_removed;
      continue;
    }
    out.kept.push_back(r);
    out.kept_index.push_back(i);
  }
  return out;
}

std::string_view MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kGaussianSkew: return "gaussian-skew";
    case Mechanism::kPlanarLaplace: return "planar-laplace";
    case Mechanism::kRedactOnly: return "redact-only";
  }
  return "unknown";
}

std::optional<Mechanism> ParseMechanism(std::string_view text) {
  if (text == "gaussian-skew") return Mechanism::kGaussianSkew;
  if (text == "planar-laplace") return Mechanism::kPlanarLaplace;
  if (text == "redact-only") return Mechanism::kRedactOnly;
  return std::nullopt;
}

MaskResult MaskDataset(const std::vector<TraceRecord>& records,
                       const MaskRequest& request) {
  switch (request.mechanism) {
    case Mechanism::kGaussianSkew:
      request.gaussian.Validate();
      if (request.population == nullptr) {
        throw Error(ErrorCode::kInvalidArgument,
                    "gaussian-skew masking requires population data");
      }
      break;
    case Mechanism::kPlanarLaplace:
      request.geoind.Validate();
      break;
    case Mechanism::kRedactOnly:
      break;
  }

  static const ZoneSet kNoZones;
  RedactionResult redacted =
      Redact(records, request.zones ? *request.zones : kNoZones, request.revoked_users);

  MaskResult result;
  result.redaction = std::move(redacted.report);
  result.records.reserve(redacted.kept.size());
  for (size_t k = 0; k < redacted.kept.size(); ++k) {
    const TraceRecord& rec = redacted.kept[k];
    MaskedRecord out;
    out.original = rec;
    out.mechanism = request.mechanism;
    Rng rng = SubstreamRng(request.seed, redacted.kept_index[k]);
    switch (request.mechanism) {
      case Mechanism::kGaussianSkew: {
        const BlockGroup* group = request.population->Locate(rec.point);
        if (group == nullptr) {
          throw Error(ErrorCode::kPointOutsideAllBlockGroups,
                      "record " + std::to_string(redacted.kept_index[k]) + " of user " +
                          rec.user_id + " lies outside every block group");
        }
        std::optional<std::string> bracket;
        if (request.age_brackets) {
          auto it = request.age_brackets->find(rec.user_id);
          if (it != request.age_brackets->end()) bracket = it->second;
        }
        const SigmaResult sigma =
            EffectiveSigma(request.gaussian, *group, *request.population, bracket);
        const Displaced moved = GaussianSkew(rec.point, sigma.sigma_m,
                                             request.gaussian.min_displacement_m, rng);
        out.masked_point = moved.point;
        out.displacement = moved.displacement;
        out.sigma_eff_m = sigma.sigma_m;
        out.multipliers = sigma.multipliers;
        out.block_group_id = group->id();
        break;
      }
      case Mechanism::kPlanarLaplace: {
        const Displaced moved = PlanarLaplace(rec.point, request.geoind, rng);
        out.masked_point = moved.point;
        out.displacement = moved.displacement;
        out.epsilon_per_m = request.geoind.epsilon_per_m;
        break;
      }
      case Mechanism::kRedactOnly:
        out.masked_point = rec.point;
        break;
    }
    result.records.push_back(std::move(out));
  }
  return result;
}

}  // namespace geomask
