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

#include <charconv>
#include <cmath>

#include "geomask/error.h"
#include "json.hpp"

namespace geomask {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

namespace {

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void WriteMaskedCsv(std::ostream& out, const std::vector<MaskedRecord>& records,
                    const std::vector<KAnonResult>* kanon) {
  if (kanon && kanon->size() != records.size()) {
    throw Error(ErrorCode::kInvalidArgument, "k-anonymity results do not match records");
  }
  out << "user_id,timestamp,lat,lon,mechanism,sigma_eff,displacement_m,k,risk\n";
  for (size_t i = 0; i < records.size(); ++i) {
    const MaskedRecord& r = records[i];
    out << CsvEscape(r.original.user_id) << ',' << FormatTimestamp(r.original.timestamp)
        << ',' << FormatDouble(r.masked_point.lat_deg) << ','
        << FormatDouble(r.masked_point.lon_deg) << ',' << MechanismName(r.mechanism) << ',';
    if (r.mechanism != Mechanism::kPlanarLaplace) out << FormatDouble(r.sigma_eff_m);
    out << ',' << FormatDouble(r.DisplacementMeters()) << ',';
    if (kanon) {
      const KAnonResult& k = (*kanon)[i];
      out << k.k << ',' << FormatDouble(k.risk.value());
    } else {
      out << ',';
    }
    out << '\n';
  }
}

std::vector<MaskedRow> ParseMaskedCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMissingHeader, "masked file is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "user_id,timestamp,lat,lon,mechanism,sigma_eff,displacement_m,k,risk") {
    throw Error(ErrorCode::kMissingHeader, "masked file has an unexpected header: " + line);
  }
  std::vector<MaskedRow> rows;
  size_t line_no = 1;
  auto number = [&](const std::string& s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kRowParseError,
                   "masked file line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() != 9) throw fail("expected 9 fields");
    MaskedRow row;
    row.user_id = f[0];
    const auto ts = ParseTimestamp(f[1]);
    if (!ts) throw fail("bad timestamp");
    row.timestamp = *ts;
    if (!number(f[2], row.point.lat_deg) || !number(f[3], row.point.lon_deg) ||
        !IsValid(row.point)) {
      throw fail("bad coordinates");
    }
    const auto mech = ParseMechanism(f[4]);
    if (!mech) throw fail("unknown mechanism " + f[4]);
    row.mechanism = *mech;
    if (!f[5].empty()) {
      double sigma = 0.0;
      if (!number(f[5], sigma)) throw fail("bad sigma_eff");
      row.sigma_eff_m = sigma;
    }
    if (!number(f[6], row.displacement_m)) throw fail("bad displacement_m");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string EvalReportJson(const EvalReport& report, const std::vector<MaskedRecord>& masked,
                           uint64_t seed) {
  const EvalSummary& s = report.summary;
  ordered_json doc;
  ordered_json summary;
  summary["n"] = s.n;
  summary["mechanism"] = s.mechanism;
  summary["coverage"] = s.coverage;
  summary["k_target"] = s.k_target;
  summary["min_k"] = s.min_k;
  summary["median_k"] = s.median_k;
  summary["mean_k"] = s.mean_k;
  summary["fraction_k_ge_target"] = s.fraction_k_ge_target;
  summary["mean_displacement_m"] = s.mean_displacement_m;
  summary["worst_case_user_k"] = s.worst_case_user_k;
  summary["seed"] = seed;
  doc["summary"] = summary;

  ordered_json per_user = ordered_json::object();
  for (const auto& [user, k] : report.per_user_min_k) per_user[user] = k;
  doc["per_user_min_k"] = per_user;

  ordered_json points = ordered_json::array();
  for (size_t i = 0; i < report.points.size(); ++i) {
    const KAnonResult& k = report.points[i];
    ordered_json p;
    p["index"] = i;
    if (i < masked.size()) {
      p["user_id"] = masked[i].original.user_id;
      p["timestamp"] = FormatTimestamp(masked[i].original.timestamp);
      p["displacement_m"] = masked[i].DisplacementMeters();
    }
    p["k"] = k.k;
    p["risk"] = "1/" + std::to_string(k.k);
    p["buffer_radius_m"] = k.buffer_radius_m;
    p["includes_original"] = k.includes_original;
    points.push_back(std::move(p));
  }
  doc["points"] = points;
  return doc.dump(2) + "\n";
}

std::string HeatMapGeoJson(const HeatMap& map) {
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  ordered_json features = ordered_json::array();
  for (const auto& [key, cell] : map.cells()) {
    if (cell.heat_class == HeatClass::kSuppressed || cell.visit_count == 0) continue;
    ordered_json ring = ordered_json::array();
    for (const auto& v : CellRing(map.spec(), key)) ring.push_back({v.lon_deg, v.lat_deg});
    ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}};
    ordered_json props;
    props["row"] = cell.row;
    props["col"] = cell.col;
    props["visit_count"] = cell.visit_count;
    if (map.mode() == HeatMode::kMultiUser) props["distinct_users"] = cell.distinct_users;
    props["class"] = std::string(HeatClassName(cell.heat_class));
    f["properties"] = props;
    features.push_back(std::move(f));
  }
  doc["features"] = features;
  return doc.dump(2) + "\n";
}

void WriteAlertsCsv(std::ostream& out, const std::vector<DangerAlert>& alerts) {
  out << "zone_id,user_id,timestamp\n";
  for (const auto& a : alerts) {
    out << CsvEscape(a.zone_id) << ',' << CsvEscape(a.user_id) << ','
        << FormatTimestamp(a.timestamp) << '\n';
  }
}

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "parameter,median_k,frac_k_ge_target,precision,recall,f1,mean_displacement_m\n";
  for (const auto& r : rows) {
    out << FormatDouble(r.parameter) << ',' << FormatDouble(r.median_k) << ','
        << FormatDouble(r.frac_k_ge_target) << ',' << FormatDouble(r.precision) << ','
        << FormatDouble(r.recall) << ',' << FormatDouble(r.f1) << ','
        << FormatDouble(r.mean_displacement_m) << '\n';
  }
}

}  // namespace geomask
