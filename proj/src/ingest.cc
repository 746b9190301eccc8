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

#include "geomask/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "geomask/error.h"
#include "geomask/rng.h"
#include "json.hpp"

namespace geomask {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Timestamps

namespace {

bool ParseFixedInt(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<Timestamp> ParseTimestamp(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h, mi, sec;
  if (s.size() < 20) return std::nullopt;
  if (!ParseFixedInt(s, 0, 4, y) || s[4] != '-' || !ParseFixedInt(s, 5, 2, mo) ||
      s[7] != '-' || !ParseFixedInt(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') ||
      !ParseFixedInt(s, 11, 2, h) || s[13] != ':' || !ParseFixedInt(s, 14, 2, mi) ||
      s[16] != ':' || !ParseFixedInt(s, 17, 2, sec)) {
    return std::nullopt;
  }
  if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::string_view rest = s.substr(19);
  int offset_s = 0;
  if (rest == "Z") {
    offset_s = 0;
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    int oh, om;
    if (!ParseFixedInt(rest, 1, 2, oh) || !ParseFixedInt(rest, 4, 2, om) || oh > 23 ||
        om > 59) {
      return std::nullopt;
    }
    offset_s = (oh * 3600 + om * 60) * (rest[0] == '+' ? 1 : -1);
  } else {
    return std::nullopt;
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - seconds{offset_s};
}

std::string FormatTimestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_days day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> ParseDouble(std::string_view s) {
  s = Trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

void StripLineEnding(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Reads the header line and checks the expected column names.
void ExpectHeader(std::istream& in, const std::vector<std::string>& expected,
                  const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMissingHeader, std::string(what) + " file is empty");
  }
  StripLineEnding(line);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line.erase(0, 3);  // UTF-8 BOM
  }
  auto fields = SplitCsvLine(line);
  for (auto& f : fields) f = std::string(Trim(f));
  if (fields != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw Error(ErrorCode::kMissingHeader,
                std::string(what) + " header must be `" + want + "`, got `" + line + "`");
  }
}

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

std::string ReadAll(const std::string& path) {
  std::ifstream in = OpenOrThrow(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TraceParseResult ParseTraces(std::istream& in) {
  ExpectHeader(in, {"user_id", "timestamp", "lat", "lon"}, "trace");
  TraceParseResult result;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    StripLineEnding(line);
    if (Trim(line).empty()) continue;
    ++result.data_rows;
    auto fields = SplitCsvLine(line);
    auto fail = [&](std::string reason) {
      result.errors.push_back({line_no, std::move(reason)});
    };
    if (fields.size() != 4) {
      fail("expected 4 fields, got " + std::to_string(fields.size()));
      continue;
    }
    const std::string user(Trim(fields[0]));
    if (user.empty()) {
      fail("empty user_id");
      continue;
    }
    auto ts = ParseTimestamp(Trim(fields[1]));
    if (!ts) {
      fail("timestamp is not ISO-8601 (YYYY-MM-DDTHH:MM:SSZ): " + fields[1]);
      continue;
    }
    auto lat = ParseDouble(fields[2]);
    auto lon = ParseDouble(fields[3]);
    if (!lat || !lon) {
      fail("lat/lon are not numbers");
      continue;
    }
    if (*lat < -90.0 || *lat > 90.0) {
      fail("lat " + std::string(Trim(fields[2])) + " violates lat in [-90, 90]");
      continue;
    }
    if (*lon < -180.0 || *lon > 180.0) {
      fail("lon " + std::string(Trim(fields[3])) + " violates lon in [-180, 180]");
      continue;
    }
    result.records.push_back({user, *ts, {*lat, *lon}});
  }
  return result;
}

TraceParseResult ParseTracesFile(const std::string& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseTraces(in);
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void WriteTraces(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << "user_id,timestamp,lat,lon\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f", r.point.lat_deg, r.point.lon_deg);
    out << CsvField(r.user_id) << ',' << FormatTimestamp(r.timestamp) << ',' << buf
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Population

BlockGroup::BlockGroup(std::string id, std::vector<Polygon> parts,
                       double total_density,
                       std::map<std::string, double> age_densities)
    : BlockGroup(id, parts, total_density, age_densities, -1.0) {}

BlockGroup::BlockGroup(std::string id, std::vector<Polygon> parts,
                       double total_density,
                       std::map<std::string, double> age_densities, double area_km2)
    : id_(std::move(id)),
      parts_(std::move(parts)),
      total_density_(total_density),
      age_densities_(std::move(age_densities)),
      area_km2_(area_km2) {
  if (parts_.empty()) {
    throw Error(ErrorCode::kInvalidPolygon, "block group " + id_ + " has no polygon");
  }
  if (!(total_density_ > 0.0) || !std::isfinite(total_density_)) {
    throw Error(ErrorCode::kNonPositiveDensity,
                "block group " + id_ + " has total_density " +
                    std::to_string(total_density_) + " (must be > 0)");
  }
  for (const auto& [bracket, d] : age_densities_) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::kNonPositiveDensity,
                  "block group " + id_ + " has age_density." + bracket + " = " +
                      std::to_string(d) + " (must be >= 0)");
    }
  }
  if (area_km2_ < 0.0) {
    double m2 = 0.0;
    for (const auto& p : parts_) m2 += p.AreaM2();
    area_km2_ = m2 / 1e6;
  }
  if (!(area_km2_ > 0.0)) {
    throw Error(ErrorCode::kInvalidPolygon, "block group " + id_ + " has zero area");
  }
  min_ = parts_.front().min_corner();
  max_ = parts_.front().max_corner();
  for (const auto& p : parts_) {
    min_.lat_deg = std::min(min_.lat_deg, p.min_corner().lat_deg);
    min_.lon_deg = std::min(min_.lon_deg, p.min_corner().lon_deg);
    max_.lat_deg = std::max(max_.lat_deg, p.max_corner().lat_deg);
    max_.lon_deg = std::max(max_.lon_deg, p.max_corner().lon_deg);
  }
}

double BlockGroup::age_density(const std::string& bracket) const {
  auto it = age_densities_.find(bracket);
  return it == age_densities_.end() ? 0.0 : it->second;
}

bool BlockGroup::Contains(const GeoPoint& p) const {
  if (!BoxContains(min_, max_, p)) return false;
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Polygon& poly) { return poly.Contains(p); });
}

PopulationDataset::PopulationDataset(std::vector<BlockGroup> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "population has no block groups");
  }
  std::unordered_set<std::string> ids;
  std::set<std::string> brackets;
  for (const auto& g : groups_) {
    if (!ids.insert(g.id()).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate block group id: " + g.id());
    }
    for (const auto& [b, d] : g.age_densities()) brackets.insert(b);
  }
  brackets_.assign(brackets.begin(), brackets.end());

  double area = 0.0, weighted_total = 0.0;
  std::map<std::string, double> weighted_age;
  for (const auto& g : groups_) {
    area += g.area_km2();
    weighted_total += g.total_density() * g.area_km2();
    for (const auto& b : brackets_) weighted_age[b] += g.age_density(b) * g.area_km2();
  }
  atpd_ = weighted_total / area;
  for (const auto& b : brackets_) agpd_[b] = weighted_age[b] / area;

  by_id_.resize(groups_.size());
  std::iota(by_id_.begin(), by_id_.end(), size_t{0});
  std::sort(by_id_.begin(), by_id_.end(),
            [&](size_t a, size_t b) { return groups_[a].id() < groups_[b].id(); });

  min_ = groups_.front().min_corner();
  max_ = groups_.front().max_corner();
  for (const auto& g : groups_) {
    min_.lat_deg = std::min(min_.lat_deg, g.min_corner().lat_deg);
    min_.lon_deg = std::min(min_.lon_deg, g.min_corner().lon_deg);
    max_.lat_deg = std::max(max_.lat_deg, g.max_corner().lat_deg);
    max_.lon_deg = std::max(max_.lon_deg, g.max_corner().lon_deg);
  }
}

double PopulationDataset::average_age_density(const std::string& bracket) const {
  auto it = agpd_.find(bracket);
  if (it == agpd_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown age bracket: " + bracket);
  }
  return it->second;
}

const BlockGroup* PopulationDataset::Locate(const GeoPoint& p) const {
  for (size_t i : by_id_) {
    if (groups_[i].Contains(p)) return &groups_[i];
  }
  return nullptr;
}

GeoPoint PopulationDataset::center() const {
  return {(min_.lat_deg + max_.lat_deg) / 2.0, (min_.lon_deg + max_.lon_deg) / 2.0};
}

namespace {

Polygon::Ring RingFromJson(const json& coords, const std::string& owner) {
  if (!coords.is_array()) {
    throw Error(ErrorCode::kInvalidPolygon, owner + ": ring is not an array");
  }
  Polygon::Ring ring;
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
        !pos[1].is_number()) {
      throw Error(ErrorCode::kInvalidPolygon, owner + ": malformed position");
    }
    // GeoJSON positions are [lon, lat].
    ring.push_back({pos[1].get<double>(), pos[0].get<double>()});
  }
  return ring;
}

Polygon PolygonFromJson(const json& rings, const std::string& owner) {
  if (!rings.is_array() || rings.empty()) {
    throw Error(ErrorCode::kInvalidPolygon, owner + ": polygon has no rings");
  }
  Polygon::Ring exterior = RingFromJson(rings[0], owner);
  std::vector<Polygon::Ring> holes;
  for (size_t i = 1; i < rings.size(); ++i) holes.push_back(RingFromJson(rings[i], owner));
  try {
    return Polygon(std::move(exterior), std::move(holes));
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidPolygon, owner + ": " + e.what());
  }
}

std::vector<Polygon> PolygonsFromGeometry(const json& geometry, const std::string& owner) {
  if (!geometry.is_object() || !geometry.contains("type") ||
      !geometry.contains("coordinates")) {
    throw Error(ErrorCode::kInvalidPolygon, owner + ": missing geometry");
  }
  const std::string type = geometry["type"].get<std::string>();
  const json& coords = geometry["coordinates"];
  std::vector<Polygon> parts;
  if (type == "Polygon") {
    parts.push_back(PolygonFromJson(coords, owner));
  } else if (type == "MultiPolygon") {
    if (!coords.is_array() || coords.empty()) {
      throw Error(ErrorCode::kInvalidPolygon, owner + ": empty MultiPolygon");
    }
    for (const auto& poly : coords) parts.push_back(PolygonFromJson(poly, owner));
  } else {
    throw Error(ErrorCode::kInvalidPolygon,
                owner + ": geometry type " + type + " is not Polygon/MultiPolygon");
  }
  return parts;
}

json ParseJsonOrThrow(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " is not valid JSON: " + e.what());
  }
}

const json& FeaturesOf(const json& doc, const char* what) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be a GeoJSON FeatureCollection");
  }
  return doc["features"];
}

std::string IdString(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

}  // namespace

PopulationDataset ParsePopulation(std::string_view geojson) {
  const json doc = ParseJsonOrThrow(geojson, "population");
  std::vector<BlockGroup> groups;
  size_t index = 0;
  for (const auto& feature : FeaturesOf(doc, "population")) {
    const std::string owner = "feature " + std::to_string(index++);
    const json props = feature.value("properties", json::object());
    if (!props.contains("id")) {
      throw Error(ErrorCode::kMissingProperty, owner + ": missing property `id`");
    }
    const std::string id = IdString(props["id"]);
    if (!props.contains("total_density") || !props["total_density"].is_number()) {
      throw Error(ErrorCode::kMissingProperty,
                  owner + " (" + id + "): missing numeric property `total_density`");
    }
    if (!props.contains("age_density") || !props["age_density"].is_object()) {
      throw Error(ErrorCode::kMissingProperty,
                  owner + " (" + id + "): missing object property `age_density`");
    }
    std::map<std::string, double> ages;
    for (const auto& [bracket, value] : props["age_density"].items()) {
      if (!value.is_number()) {
        throw Error(ErrorCode::kMissingProperty,
                    owner + " (" + id + "): age_density." + bracket + " is not a number");
      }
      ages[bracket] = value.get<double>();
    }
    auto parts = PolygonsFromGeometry(feature.value("geometry", json()), owner);
    try {
      groups.emplace_back(id, std::move(parts), props["total_density"].get<double>(),
                          std::move(ages));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kOutOfFrame) {
        throw Error(ErrorCode::kInvalidPolygon, owner + " spans more than 1 degree");
      }
      throw;
    }
  }
  return PopulationDataset(std::move(groups));
}

PopulationDataset ParsePopulationFile(const std::string& path) {
  return ParsePopulation(ReadAll(path));
}

// ---------------------------------------------------------------------------
// Residential points

ResidentialPoints ParseResidential(std::istream& in) {
  ExpectHeader(in, {"id", "lat", "lon"}, "residential");
  ResidentialPoints out;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    StripLineEnding(line);
    if (Trim(line).empty()) continue;
    auto f = SplitCsvLine(line);
    auto lat = f.size() == 3 ? ParseDouble(f[1]) : std::nullopt;
    auto lon = f.size() == 3 ? ParseDouble(f[2]) : std::nullopt;
    if (!lat || !lon || !IsValid({*lat, *lon})) {
      throw Error(ErrorCode::kRowParseError,
                  "residential line " + std::to_string(line_no) + ": malformed row");
    }
    out.push_back({std::string(Trim(f[0])), {*lat, *lon}});
  }
  return out;
}

ResidentialPoints ParseResidentialFile(const std::string& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseResidential(in);
}

ResidentialPoints SampleResidentialPoints(const PopulationDataset& pop,
                                          uint64_t persons_per_point, uint64_t seed) {
  if (persons_per_point < 1) {
    throw Error(ErrorCode::kInvalidArgument, "persons_per_point must be >= 1");
  }
  constexpr uint64_t kMaxAttemptsPerPoint = 1'000'000;
  ResidentialPoints out;
  for (size_t gi = 0; gi < pop.groups().size(); ++gi) {
    const BlockGroup& g = pop.groups()[gi];
    const auto n = static_cast<uint64_t>(std::llround(
        g.total_density() * g.area_km2() / static_cast<double>(persons_per_point)));
    Rng rng = SubstreamRng(seed, StableHash(g.id()));
    const GeoPoint lo = g.min_corner(), hi = g.max_corner();
    for (uint64_t j = 0; j < n; ++j) {
      uint64_t attempts = 0;
      while (true) {
        const GeoPoint p{lo.lat_deg + UniformUnit(rng) * (hi.lat_deg - lo.lat_deg),
                         lo.lon_deg + UniformUnit(rng) * (hi.lon_deg - lo.lon_deg)};
        const bool inside = std::any_of(g.parts().begin(), g.parts().end(),
                                        [&](const Polygon& poly) {
                                          return poly.ContainsStrictly(p);
                                        });
        if (inside) {
          out.push_back({g.id() + "-h" + std::to_string(j), p});
          break;
        }
        if (++attempts > kMaxAttemptsPerPoint) {
          throw Error(ErrorCode::kRejectionBudgetExceeded,
                      "could not place residential point in block group " + g.id());
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zones

std::string_view ZoneLabelName(ZoneLabel label) {
  switch (label) {
    case ZoneLabel::kPrivate: return "private";
    case ZoneLabel::kPublic: return "public";
    case ZoneLabel::kDanger: return "danger";
  }
  return "unknown";
}

std::optional<ZoneLabel> ParseZoneLabel(std::string_view text) {
  if (text == "private") return ZoneLabel::kPrivate;
  if (text == "public") return ZoneLabel::kPublic;
  if (text == "danger") return ZoneLabel::kDanger;
  return std::nullopt;
}

bool Zone::Contains(const GeoPoint& p) const {
  if (const auto* poly = std::get_if<Polygon>(&geometry)) return poly->Contains(p);
  const auto& c = std::get<Circle>(geometry);
  return HaversineDistance(c.center, p) <= c.radius_m;
}

bool ZoneSet::HasLabel(ZoneLabel label) const {
  return std::any_of(zones.begin(), zones.end(),
                     [&](const Zone& z) { return z.label == label; });
}

ZoneSet ParseZones(std::string_view geojson) {
  const json doc = ParseJsonOrThrow(geojson, "zones");
  ZoneSet set;
  size_t index = 0;
  for (const auto& feature : FeaturesOf(doc, "zones")) {
    const std::string owner = "zone feature " + std::to_string(index);
    const json props = feature.value("properties", json::object());
    const std::string id =
        props.contains("id") ? IdString(props["id"]) : "zone-" + std::to_string(index);
    ++index;
    if (!props.contains("label") || !props["label"].is_string()) {
      throw Error(ErrorCode::kMissingProperty, owner + ": missing property `label`");
    }
    const std::string label_text = props["label"].get<std::string>();
    const auto label = ParseZoneLabel(label_text);
    if (!label) {
      throw Error(ErrorCode::kUnknownLabel,
                  owner + ": label `" + label_text +
                      "` is not one of private, public, danger");
    }
    const json geometry = feature.value("geometry", json());
    const std::string type =
        geometry.is_object() ? geometry.value("type", "") : std::string();
    if (type == "Point") {
      const json& c = geometry["coordinates"];
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
        throw Error(ErrorCode::kInvalidArgument, owner + ": malformed Point");
      }
      const GeoPoint center{c[1].get<double>(), c[0].get<double>()};
      if (!IsValid(center)) {
        throw Error(ErrorCode::kInvalidArgument, owner + ": Point out of range");
      }
      if (!props.contains("radius_m") || !props["radius_m"].is_number()) {
        throw Error(ErrorCode::kMissingRadius,
                    owner + ": Point zone needs numeric property `radius_m`");
      }
      const double radius = props["radius_m"].get<double>();
      if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::kInvalidArgument, owner + ": radius_m must be > 0");
      }
      set.zones.push_back({id, Circle{center, radius}, *label});
    } else {
      auto parts = PolygonsFromGeometry(geometry, owner);
      for (size_t p = 0; p < parts.size(); ++p) {
        set.zones.push_back({parts.size() == 1 ? id : id + "#" + std::to_string(p),
                             std::move(parts[p]), *label});
      }
    }
  }
  return set;
}

ZoneSet ParseZonesFile(const std::string& path) { return ParseZones(ReadAll(path)); }

// ---------------------------------------------------------------------------
// Age sidecar

AgeBrackets ParseAgeBrackets(std::istream& in) {
  ExpectHeader(in, {"user_id", "bracket"}, "age bracket");
  AgeBrackets out;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    StripLineEnding(line);
    if (Trim(line).empty()) continue;
    auto f = SplitCsvLine(line);
    if (f.size() != 2 || Trim(f[0]).empty() || Trim(f[1]).empty()) {
      throw Error(ErrorCode::kRowParseError,
                  "age bracket line " + std::to_string(line_no) + ": malformed row");
    }
    out[std::string(Trim(f[0]))] = std::string(Trim(f[1]));
  }
  return out;
}

AgeBrackets ParseAgeBracketsFile(const std::string& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseAgeBrackets(in);
}

}  // namespace geomask
