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

#ifndef GEOMASK_MASK_H_
#define GEOMASK_MASK_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geomask/geo.h"
#include "geomask/ingest.h"
#include "geomask/rng.h"

namespace geomask {

// Density multipliers ------------------------------------------------------

// APDM = AGPD / UBGAD. Throws Error(kNonPositiveDensity) unless both > 0.
double AgeDensityMultiplier(double dataset_age_density, double group_age_density);
// TPDM = ATPD / UBGPD. Throws Error(kNonPositiveDensity) unless both > 0.
double TotalDensityMultiplier(double dataset_total_density, double group_total_density);
// CM = AM * APDM + (1 - AM) * TPDM. Throws Error(kAmOutOfRange) unless
// 0 <= AM <= 1.
double CombinedMultiplier(double age_weight, double apdm, double tpdm);

struct Multipliers {
  std::optional<double> apdm;  // absent when the user has no age bracket
  double tpdm = 0.0;
  double cm = 0.0;
  double age_weight = 0.0;  // AM actually applied (0 without a bracket)
};

// Gaussian skew configuration. `c` scales the combined multiplier into a
// standard deviation in meters.
struct MaskConfig {
  double c_m = 100.0;
  double age_weight = 0.0;
  double min_displacement_m = 0.0;

  void Validate() const;
};

struct GeoIndConfig {
  double epsilon_per_m = 0.01;
  // Documents the (epsilon, r) privacy level; not used in sampling.
  double nominal_radius_m = 100.0;

  void Validate() const;
};

struct SigmaResult {
  double sigma_m = 0.0;
  Multipliers multipliers;
};

// sigma_eff = c * CM for the block group. With no bracket, AM is treated
// as 0 and only TPDM contributes.
SigmaResult EffectiveSigma(const MaskConfig& cfg, const BlockGroup& group,
                           const PopulationDataset& pop,
                           const std::optional<std::string>& bracket);

// Mechanisms ---------------------------------------------------------------

struct Displaced {
  GeoPoint point;
  LocalXY displacement;
};

inline constexpr uint64_t kMaxRejectionDraws = 1'000'000;

// Independent N(0, sigma^2) east/north offsets, redrawn until the radial
// offset reaches min_displacement_m.
Displaced GaussianSkew(const GeoPoint& p, double sigma_m, double min_displacement_m,
                       Rng& rng);

// Principal-branch-minus-one Lambert W for x in [-1/e, 0). Halley iteration
// to |w e^w - x| < 1e-12 (relative for tiny |x|).
double LambertWm1(double x);

// Inverse CDF of the planar Laplace radius, C(r) = 1 - (1 + eps r) e^{-eps r}.
double PlanarLaplaceInverseCdf(double epsilon_per_m, double p);
double PlanarLaplaceCdf(double epsilon_per_m, double r);

Displaced PlanarLaplace(const GeoPoint& p, const GeoIndConfig& cfg, Rng& rng);

// Redaction ----------------------------------------------------------------

struct RedactionReport {
  // Records removed per private zone (first containing zone in file order).
  std::map<std::string, size_t> by_zone;
  // Records removed per fully revoked user.
  std::map<std::string, size_t> by_user;
  size_t total_removed = 0;
};

struct RedactionResult {
  std::vector<TraceRecord> kept;
  // Input positions of kept records.
  std::vector<size_t> kept_index;
  RedactionReport report;
};

// Drops every record of a revoked user, then every record inside a private
// zone. Public and danger zones are ignored.
RedactionResult Redact(const std::vector<TraceRecord>& records, const ZoneSet& zones,
                       const std::set<std::string>& revoked_users);

// Dataset masking ----------------------------------------------------------

enum class Mechanism { kGaussianSkew, kPlanarLaplace, kRedactOnly };

std::string_view MechanismName(Mechanism m);
std::optional<Mechanism> ParseMechanism(std::string_view text);

struct MaskedRecord {
  TraceRecord original;
  GeoPoint masked_point;
  LocalXY displacement;
  double sigma_eff_m = 0.0;
  std::optional<Multipliers> multipliers;
  Mechanism mechanism = Mechanism::kGaussianSkew;
  // Planar Laplace only.
  std::optional<double> epsilon_per_m;
  std::optional<std::string> block_group_id;

  double DisplacementMeters() const { return displacement.Norm(); }
};

struct MaskRequest {
  Mechanism mechanism = Mechanism::kGaussianSkew;
  MaskConfig gaussian;
  GeoIndConfig geoind;
  const PopulationDataset* population = nullptr;  // required for gaussian skew
  const AgeBrackets* age_brackets = nullptr;
  const ZoneSet* zones = nullptr;
  std::set<std::string> revoked_users;
  uint64_t seed = 0;
};

struct MaskResult {
  std::vector<MaskedRecord> records;
  RedactionReport redaction;
};

// Redacts first, then masks each surviving record with a generator keyed by
// (seed, input position). Output keeps input order.
MaskResult MaskDataset(const std::vector<TraceRecord>& records, const MaskRequest& request);

}  // namespace geomask

#endif  // GEOMASK_MASK_H_
