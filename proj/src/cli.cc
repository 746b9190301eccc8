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

#include "geomask/cli.h"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "geomask/error.h"
#include "geomask/geo.h"
#include "geomask/heatmap.h"
#include "geomask/ingest.h"
#include "geomask/mask.h"
#include "geomask/output.h"
#include "geomask/privacy.h"
#include "geomask/tracesim.h"
#include "json.hpp"

namespace geomask::cli {

namespace {

struct Flags {
  std::string command;

  // inputs / outputs
  std::string traces, population, homes, zones, ages, masked, out, out_csv, alerts_out;
  std::string revoke, infected, infected_file, infected_out, grid, now, start;
  std::string mechanism = "gaussian-skew";
  std::string mode = "multi";
  std::string user;

  // numeric
  double c = 100.0;
  double am = 0.0;
  double min_displacement = 0.0;
  double epsilon = 0.01;
  double radius = 100.0;
  double coverage = kDefaultCoverage;
  double cell_size = 100.0;
  double d_max = kDefaultContactDistanceM;
  double speed = 1.4;
  double required_fraction = 0.95;
  int replicates = 3;
  double margin_z = 3.0;
  int64_t t_window = kDefaultContactWindowS;
  int window_days = kDefaultRetentionDays;
  int coarsen = 1;
  uint64_t k_target = 5;
  uint64_t k_min = 5;
  uint64_t synthesize_homes = 0;
  uint64_t seed = 0;
  uint64_t users = 100;
  uint64_t n_infected = 5;
  uint64_t hours = 24;
  uint64_t step_minutes = 5;
  uint64_t max_eval_points = 5000;
  uint64_t calibrate_sample = 10000;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::string Num(double v) { return FormatDouble(v); }

void WriteFileAtomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + path);
  }
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t\r") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<TraceRecord> LoadTraces(const std::string& path, std::ostream& err) {
  TraceParseResult parsed = ParseTracesFile(path);
  for (const auto& e : parsed.errors) {
    err << "warning: " << path << ":" << e.line << ": skipped row: " << e.reason << "\n";
  }
  if (!parsed.errors.empty()) {
    err << "warning: " << parsed.errors.size() << " of " << parsed.data_rows
        << " rows rejected in " << path << "\n";
  }
  return std::move(parsed.records);
}

void ValidateCommon(const Flags& f) {
  Require(f.coverage > 0.0 && f.coverage < 1.0,
          "--coverage must be in (0, 1) (got " + Num(f.coverage) + ")");
  Require(f.k_target >= 1, "--k-target must be >= 1");
}

ResidentialPoints LoadHomes(const Flags& f, const PopulationDataset* pop) {
  if (!f.homes.empty()) return ParseResidentialFile(f.homes);
  if (f.synthesize_homes > 0) {
    if (pop == nullptr) {
      throw ValidationError("--synthesize-homes requires --population");
    }
    return SampleResidentialPoints(*pop, f.synthesize_homes, f.seed);
  }
  throw Error(ErrorCode::kNoResidentialData,
              "no residential source: pass --homes <csv> or --synthesize-homes <persons>");
}

std::set<std::string> LoadInfected(const Flags& f) {
  std::set<std::string> out;
  for (const auto& id : SplitList(f.infected)) out.insert(id);
  if (!f.infected_file.empty()) {
    std::ifstream in(f.infected_file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + f.infected_file);
    std::string line;
    while (std::getline(in, line)) {
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (!line.empty()) out.insert(line);
    }
  }
  return out;
}

struct ParsedGrid {
  std::string name;
  std::vector<double> values;
};

ParsedGrid ParseGrid(const std::string& text) {
  const auto eq = text.find('=');
  Require(eq != std::string::npos && eq > 0,
          "--grid must look like c=50,100,200 or epsilon=0.01,0.02 (got `" + text + "`)");
  ParsedGrid g{text.substr(0, eq), {}};
  Require(g.name == "c" || g.name == "epsilon",
          "--grid parameter must be c or epsilon (got `" + g.name + "`)");
  for (const auto& item : SplitList(text.substr(eq + 1))) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    Require(ec == std::errc() && ptr == item.data() + item.size() && std::isfinite(v),
            "--grid value `" + item + "` is not a number");
    Require(v > 0.0, "--grid values must be > 0 (got " + item + ")");
    g.values.push_back(v);
  }
  Require(!g.values.empty(), "--grid has no values");
  return g;
}

// mask ----------------------------------------------------------------------

int CmdMask(const Flags& f, std::ostream& err) {
  const auto mech = ParseMechanism(f.mechanism);
  Require(mech.has_value(), "--mechanism must be gaussian-skew, planar-laplace or redact-only "
                            "(got `" + f.mechanism + "`)");
  Require(f.c > 0.0, "--c must be > 0 m (got " + Num(f.c) + ")");
  Require(f.am >= 0.0 && f.am <= 1.0, "--am must be in [0, 1] (got " + Num(f.am) + ")");
  Require(f.min_displacement >= 0.0,
          "--min-displacement must be >= 0 m (got " + Num(f.min_displacement) + ")");
  Require(f.epsilon > 0.0, "--epsilon must be > 0 per m (got " + Num(f.epsilon) + ")");
  Require(f.radius > 0.0, "--radius must be > 0 m (got " + Num(f.radius) + ")");
  ValidateCommon(f);
  Require(*mech != Mechanism::kGaussianSkew || !f.population.empty(),
          "--population is required for --mechanism gaussian-skew");

  const auto records = LoadTraces(f.traces, err);
  std::optional<PopulationDataset> pop;
  if (!f.population.empty()) pop.emplace(ParsePopulationFile(f.population));
  std::optional<ZoneSet> zones;
  if (!f.zones.empty()) zones.emplace(ParseZonesFile(f.zones));
  std::optional<AgeBrackets> ages;
  if (!f.ages.empty()) ages.emplace(ParseAgeBracketsFile(f.ages));

  MaskRequest req;
  req.mechanism = *mech;
  req.gaussian = {f.c, f.am, f.min_displacement};
  req.geoind = {f.epsilon, f.radius};
  req.population = pop ? &*pop : nullptr;
  req.age_brackets = ages ? &*ages : nullptr;
  req.zones = zones ? &*zones : nullptr;
  for (const auto& u : SplitList(f.revoke)) req.revoked_users.insert(u);
  req.seed = f.seed;
  const MaskResult result = MaskDataset(records, req);
  if (result.redaction.total_removed > 0) {
    err << "redacted " << result.redaction.total_removed << " records\n";
  }

  std::ostringstream csv;
  if (!f.homes.empty() || f.synthesize_homes > 0) {
    const PointIndex homes = PointIndex::Build(LoadHomes(f, req.population));
    std::vector<KAnonResult> kanon;
    for (const auto& r : result.records) {
      kanon.push_back(KAnonymity(r, homes, BufferRadiusFor(r, f.coverage)));
    }
    WriteMaskedCsv(csv, result.records, &kanon);
  } else {
    WriteMaskedCsv(csv, result.records);
  }
  WriteFileAtomic(f.out, csv.str());
  return kExitOk;
}

// evaluate ------------------------------------------------------------------

int CmdEvaluate(const Flags& f, std::ostream& err) {
  ValidateCommon(f);
  Require(f.epsilon > 0.0, "--epsilon must be > 0 per m (got " + Num(f.epsilon) + ")");
  std::ifstream in(f.masked, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + f.masked);
  const auto rows = ParseMaskedCsv(in);
  Require(!rows.empty(), "masked file " + f.masked + " has no records");

  std::optional<PopulationDataset> pop;
  if (!f.population.empty()) pop.emplace(ParsePopulationFile(f.population));
  const PointIndex homes = PointIndex::Build(LoadHomes(f, pop ? &*pop : nullptr));

  // Originals are matched on (user, timestamp) in file order.
  std::map<std::pair<std::string, int64_t>, std::vector<GeoPoint>> originals;
  if (!f.traces.empty()) {
    for (const auto& r : LoadTraces(f.traces, err)) {
      originals[{r.user_id, r.timestamp.time_since_epoch().count()}].push_back(r.point);
    }
    for (auto& [key, pts] : originals) std::reverse(pts.begin(), pts.end());
  }

  std::vector<MaskedRecord> masked;
  masked.reserve(rows.size());
  std::vector<KAnonResult> points;
  size_t unmatched = 0;
  for (const auto& row : rows) {
    MaskedRecord m;
    m.original = {row.user_id, row.timestamp, row.point};
    m.masked_point = row.point;
    m.mechanism = row.mechanism;
    m.sigma_eff_m = row.sigma_eff_m.value_or(0.0);
    m.displacement = {row.displacement_m, 0.0};
    if (row.mechanism == Mechanism::kPlanarLaplace) m.epsilon_per_m = f.epsilon;
    std::optional<GeoPoint> original;
    auto it = originals.find({row.user_id, row.timestamp.time_since_epoch().count()});
    if (it != originals.end() && !it->second.empty()) {
      original = it->second.back();
      it->second.pop_back();
      m.original.point = *original;
    } else {
      ++unmatched;
    }
    points.push_back(KAnonymity(m.masked_point, original, homes, BufferRadiusFor(m, f.coverage)));
    masked.push_back(std::move(m));
  }
  if (!f.traces.empty() && unmatched > 0) {
    err << "warning: " << unmatched << " masked rows had no original in " << f.traces << "\n";
  }

  EvalReport report;
  report.points = points;
  for (size_t i = 0; i < masked.size(); ++i) {
    auto [pos, inserted] = report.per_user_min_k.emplace(masked[i].original.user_id, points[i].k);
    if (!inserted) pos->second = std::min(pos->second, points[i].k);
  }
  report.summary = Summarize(masked, points, {f.coverage, f.k_target});
  WriteFileAtomic(f.out, EvalReportJson(report, masked, f.seed));
  if (!f.out_csv.empty()) {
    std::ostringstream csv;
    WriteMaskedCsv(csv, masked, &points);
    WriteFileAtomic(f.out_csv, csv.str());
  }
  return kExitOk;
}

// calibrate -----------------------------------------------------------------

int CmdCalibrate(const Flags& f, std::ostream& err) {
  ValidateCommon(f);
  Require(f.am >= 0.0 && f.am <= 1.0, "--am must be in [0, 1] (got " + Num(f.am) + ")");
  Require(f.min_displacement >= 0.0,
          "--min-displacement must be >= 0 m (got " + Num(f.min_displacement) + ")");
  Require(f.required_fraction > 0.0 && f.required_fraction <= 1.0,
          "--required-fraction must be in (0, 1] (got " + Num(f.required_fraction) + ")");
  Require(f.calibrate_sample >= 1, "--sample must be >= 1");
  Require(f.margin_z >= 0.0, "--margin-z must be >= 0 (got " + Num(f.margin_z) + ")");
  Require(f.replicates >= 1, "--replicates must be >= 1 (got " + std::to_string(f.replicates) + ")");
  const auto records = LoadTraces(f.traces, err);
  Require(!records.empty(), "trace file " + f.traces + " has no records");
  const PopulationDataset pop = ParsePopulationFile(f.population);
  std::optional<AgeBrackets> ages;
  if (!f.ages.empty()) ages.emplace(ParseAgeBracketsFile(f.ages));
  const PointIndex homes = PointIndex::Build(LoadHomes(f, &pop));

  std::vector<TraceRecord> sample;
  const size_t stride = std::max<size_t>(1, (records.size() + f.calibrate_sample - 1) /
                                                f.calibrate_sample);
  for (size_t i = 0; i < records.size(); i += stride) sample.push_back(records[i]);

  CalibrationRequest req;
  req.population = &pop;
  req.age_brackets = ages ? &*ages : nullptr;
  req.base = {1.0, f.am, f.min_displacement};
  req.k_target = f.k_target;
  req.coverage = f.coverage;
  req.required_fraction = f.required_fraction;
  req.replicates = f.replicates;
  req.margin_z = f.margin_z;
  req.seed = f.seed;
  const CalibrationResult result = CalibrateC(sample, homes, req);

  nlohmann::ordered_json doc;
  doc["c_m"] = result.c_m;
  doc["achieved_fraction"] = result.achieved_fraction;
  doc["grid_steps"] = result.steps;
  doc["k_target"] = f.k_target;
  doc["coverage"] = f.coverage;
  doc["sample_size"] = sample.size();
  doc["replicates"] = f.replicates;
  doc["margin_z"] = f.margin_z;
  doc["seed"] = f.seed;
  WriteFileAtomic(f.out, doc.dump(2) + "\n");
  return kExitOk;
}

// heatmap -------------------------------------------------------------------

GridSpec GridCovering(const std::vector<TraceRecord>& records, double cell_size_m) {
  GeoPoint lo = records.front().point, hi = lo;
  for (const auto& r : records) {
    lo.lat_deg = std::min(lo.lat_deg, r.point.lat_deg);
    lo.lon_deg = std::min(lo.lon_deg, r.point.lon_deg);
    hi.lat_deg = std::max(hi.lat_deg, r.point.lat_deg);
    hi.lon_deg = std::max(hi.lon_deg, r.point.lon_deg);
  }
  const LocalFrame frame(lo);
  Require(frame.InFrame(hi), "trace extent exceeds 1 degree; heat maps need a local extent");
  const LocalXY far = frame.Project(hi);
  GridSpec spec;
  spec.origin = lo;
  spec.cell_size_m = cell_size_m;
  spec.cols = static_cast<int64_t>(std::floor(far.x / cell_size_m)) + 1;
  spec.rows = static_cast<int64_t>(std::floor(far.y / cell_size_m)) + 1;
  return spec;
}

int CmdHeatmap(const Flags& f, std::ostream& err) {
  Require(f.mode == "single" || f.mode == "multi",
          "--mode must be single or multi (got `" + f.mode + "`)");
  Require(f.mode != "single" || !f.user.empty(), "--mode single requires --user");
  Require(f.cell_size > 0.0, "--cell-size must be > 0 m (got " + Num(f.cell_size) + ")");
  Require(f.k_min >= 1, "--k-min must be >= 1");
  Require(f.window_days >= 1,
          "--window-days must be >= 1 (got " + std::to_string(f.window_days) + ")");
  Require(f.coarsen >= 1, "--coarsen must be >= 1 (got " + std::to_string(f.coarsen) + ")");
  std::optional<Timestamp> now;
  if (!f.now.empty()) {
    now = ParseTimestamp(f.now);
    Require(now.has_value(), "--now must be an ISO-8601 UTC time (got `" + f.now + "`)");
  }

  auto records = LoadTraces(f.traces, err);
  ZoneSet zones;
  if (!f.zones.empty()) zones = ParseZonesFile(f.zones);

  if (f.mode == "single") {
    const bool known = std::any_of(records.begin(), records.end(),
                                   [&](const TraceRecord& r) { return r.user_id == f.user; });
    Require(known, "--user " + f.user + " does not appear in " + f.traces);
    std::erase_if(records, [&](const TraceRecord& r) { return r.user_id != f.user; });
  }
  if (!records.empty()) {
    if (!now) {
      now = std::max_element(records.begin(), records.end(),
                             [](const TraceRecord& a, const TraceRecord& b) {
                               return a.timestamp < b.timestamp;
                             })->timestamp;
    }
    records = RetentionFilter(records, *now, f.window_days);
  }

  std::string geojson = "{\n  \"type\": \"FeatureCollection\",\n  \"features\": []\n}\n";
  if (!records.empty()) {
    const GridSpec spec = GridCovering(records, f.cell_size);
    HeatMap map = f.mode == "single" ? AggregateSingle(records, spec, zones)
                                     : AggregateMulti(records, spec, f.k_min, zones);
    if (f.coarsen > 1) map = Coarsen(map, f.coarsen);
    geojson = HeatMapGeoJson(map);
  }
  WriteFileAtomic(f.out, geojson);

  if (zones.HasLabel(ZoneLabel::kDanger)) {
    std::ostringstream csv;
    WriteAlertsCsv(csv, DangerOverlay(zones, records));
    WriteFileAtomic(f.alerts_out.empty() ? f.out + ".alerts.csv" : f.alerts_out, csv.str());
  }
  return kExitOk;
}

// simulate ------------------------------------------------------------------

int CmdSimulate(const Flags& f, std::ostream&) {
  Require(f.n_infected <= f.users, "--infected-count (" + std::to_string(f.n_infected) +
                                       ") must be <= --users (" + std::to_string(f.users) + ")");
  Require(f.step_minutes >= 1, "--step-minutes must be >= 1");
  Require(f.speed >= 0.0, "--speed must be >= 0 m/s (got " + Num(f.speed) + ")");
  SimConfig cfg;
  if (!f.start.empty()) {
    const auto start = ParseTimestamp(f.start);
    Require(start.has_value(), "--start must be an ISO-8601 UTC time (got `" + f.start + "`)");
    cfg.start = *start;
  }
  const PopulationDataset pop = ParsePopulationFile(f.population);
  cfg.n_users = f.users;
  cfg.n_infected = f.n_infected;
  cfg.duration_hours = f.hours;
  cfg.step_minutes = f.step_minutes;
  cfg.speed_mps = f.speed;
  cfg.seed = f.seed;
  cfg.world = &pop;
  std::ostringstream csv;
  WriteTraces(csv, GenerateTraces(cfg));
  WriteFileAtomic(f.out, csv.str());
  if (!f.infected_out.empty()) {
    std::string ids;
    for (const auto& id : InfectedUsers(cfg)) ids += id + "\n";
    WriteFileAtomic(f.infected_out, ids);
  }
  return kExitOk;
}

// sweep ---------------------------------------------------------------------

int CmdSweep(const Flags& f, std::ostream& err) {
  const ParsedGrid grid = ParseGrid(f.grid);
  const auto mech = ParseMechanism(f.mechanism);
  Require(mech == Mechanism::kGaussianSkew || mech == Mechanism::kPlanarLaplace,
          "--mechanism must be gaussian-skew or planar-laplace for a sweep");
  Require(grid.name == (mech == Mechanism::kGaussianSkew ? "c" : "epsilon"),
          "--grid parameter `" + grid.name + "` does not match --mechanism " + f.mechanism);
  Require(f.am >= 0.0 && f.am <= 1.0, "--am must be in [0, 1] (got " + Num(f.am) + ")");
  Require(f.min_displacement >= 0.0,
          "--min-displacement must be >= 0 m (got " + Num(f.min_displacement) + ")");
  Require(f.d_max > 0.0, "--d-max must be > 0 m (got " + Num(f.d_max) + ")");
  Require(f.t_window >= 0, "--t-window must be >= 0 s (got " + std::to_string(f.t_window) + ")");
  ValidateCommon(f);
  const std::set<std::string> infected = LoadInfected(f);
  Require(!infected.empty(), "sweep needs --infected ids or --infected-file");

  const auto records = LoadTraces(f.traces, err);
  const PopulationDataset pop = ParsePopulationFile(f.population);
  std::optional<AgeBrackets> ages;
  if (!f.ages.empty()) ages.emplace(ParseAgeBracketsFile(f.ages));
  const PointIndex homes = PointIndex::Build(LoadHomes(f, &pop));

  SweepRequest req;
  req.mechanism = *mech;
  req.grid = grid.values;
  req.gaussian = {1.0, f.am, f.min_displacement};
  req.geoind = {1.0, f.radius};
  req.population = &pop;
  req.age_brackets = ages ? &*ages : nullptr;
  req.infected = infected;
  req.exposure = {f.d_max, f.t_window};
  req.k_target = f.k_target;
  req.coverage = f.coverage;
  req.max_eval_points = f.max_eval_points;
  req.seed = f.seed;
  std::ostringstream csv;
  WriteSweepCsv(csv, TradeoffSweep(records, homes, req));
  WriteFileAtomic(f.out, csv.str());
  return kExitOk;
}

std::string Trimmed(std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

// Splices `key=value` lines from a --config file in as flags right after the
// --config argument. A flag given on the command line wins over the file.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::string path;
  size_t insert_at = 0;
  std::set<std::string> given;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      insert_at = i + 2;
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
      insert_at = i + 1;
    }
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open --config file " + path);
  std::vector<std::string> extra;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trimmed(line.substr(0, line.find_first_of("#;")));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : Trimmed(line.substr(0, eq));
    std::string value = eq == std::string::npos ? "" : Trimmed(line.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError("--config " + path + ":" + std::to_string(line_no) +
                            ": expected key=value");
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const std::string flag = "--" + (key.rfind("--", 0) == 0 ? key.substr(2) : key);
    if (given.count(flag)) continue;
    extra.push_back(flag);
    extra.push_back(value);
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<ptrdiff_t>(insert_at));
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + static_cast<ptrdiff_t>(insert_at), args.end());
  return out;
}

void AddSeed(CLI::App* app, Flags& f) {
  app->add_option("--seed", f.seed, "Seed for every random draw")->capture_default_str();
  app->add_option("--config", "key=value file of flags (no dashes); explicit flags win");
}

void AddHomes(CLI::App* app, Flags& f) {
  app->add_option("--homes", f.homes, "Residential points CSV (id,lat,lon)");
  app->add_option("--synthesize-homes", f.synthesize_homes,
                  "Synthesize residential points from --population, one per N persons");
  app->add_option("--coverage", f.coverage,
                  "Probability that the buffer disk holds the true location")
      ->capture_default_str();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"geomask: population-density geomasking and spatial k-anonymity tools",
               "geomask"};
  app.require_subcommand(1);

  auto* mask = app.add_subcommand("mask", "Mask a trace CSV");
  mask->add_option("--traces", f.traces, "Trace CSV (user_id,timestamp,lat,lon)")
      ->required();
  mask->add_option("--mechanism", f.mechanism,
                   "gaussian-skew | planar-laplace | redact-only")
      ->required();
  mask->add_option("--population", f.population, "Block-group GeoJSON (gaussian-skew)");
  mask->add_option("--c", f.c, "Scaling factor c in meters; sigma = c * CM")
      ->capture_default_str();
  mask->add_option("--am", f.am, "Age multiplier weight AM in [0, 1]")->capture_default_str();
  mask->add_option("--min-displacement", f.min_displacement,
                   "Minimum displacement in meters (gaussian-skew)")
      ->capture_default_str();
  mask->add_option("--epsilon", f.epsilon, "Planar Laplace epsilon, per meter")
      ->capture_default_str();
  mask->add_option("--radius", f.radius, "Nominal protection radius r in meters (planar-laplace)")
      ->capture_default_str();
  mask->add_option("--zones", f.zones, "Zone GeoJSON; private zones are redacted");
  mask->add_option("--revoke", f.revoke, "Comma-separated users whose consent is fully revoked");
  mask->add_option("--ages", f.ages, "Age bracket sidecar CSV (user_id,bracket)");
  mask->add_option("--out", f.out, "Masked CSV output")->required();
  AddHomes(mask, f);
  AddSeed(mask, f);
  mask->callback([&] { f.command = "mask"; });

  auto* evaluate = app.add_subcommand("evaluate", "Spatial k-anonymity report for a masked CSV");
  evaluate->add_option("--masked", f.masked, "Masked CSV from `mask`")
      ->required();
  evaluate->add_option("--traces", f.traces,
                       "Original trace CSV; enables counting the true location");
  evaluate->add_option("--population", f.population, "Block-group GeoJSON");
  evaluate->add_option("--k-target", f.k_target, "Anonymity target k")->capture_default_str();
  evaluate->add_option("--epsilon", f.epsilon, "Epsilon used for planar-laplace rows, per meter")
      ->capture_default_str();
  evaluate->add_option("--out", f.out, "JSON report output")->required();
  evaluate->add_option("--out-csv", f.out_csv, "Masked CSV with k and risk filled in");
  AddHomes(evaluate, f);
  AddSeed(evaluate, f);
  evaluate->callback([&] { f.command = "evaluate"; });

  auto* calibrate = app.add_subcommand(
      "calibrate", "Smallest c on a 1.25x grid meeting the k target for the required fraction");
  calibrate->add_option("--traces", f.traces, "Trace CSV")->required();
  calibrate->add_option("--population", f.population, "Block-group GeoJSON")
      ->required();
  calibrate->add_option("--ages", f.ages, "Age bracket sidecar CSV");
  calibrate->add_option("--am", f.am, "Age multiplier weight AM in [0, 1]")->capture_default_str();
  calibrate->add_option("--min-displacement", f.min_displacement, "Minimum displacement in meters")
      ->capture_default_str();
  calibrate->add_option("--k-target", f.k_target, "Anonymity target k")->capture_default_str();
  calibrate->add_option("--required-fraction", f.required_fraction,
                        "Fraction of points that must reach the target")
      ->capture_default_str();
  calibrate->add_option("--replicates", f.replicates,
                        "Masking runs per grid value; all must reach the fraction")
      ->capture_default_str();
  calibrate->add_option("--margin-z", f.margin_z,
                        "Binomial standard errors a replicate must clear the fraction by")
      ->capture_default_str();
  calibrate->add_option("--sample", f.calibrate_sample, "Records sampled (evenly strided)")
      ->capture_default_str();
  calibrate->add_option("--out", f.out, "JSON output")->required();
  AddHomes(calibrate, f);
  AddSeed(calibrate, f);
  calibrate->callback([&] { f.command = "calibrate"; });

  auto* heatmap = app.add_subcommand("heatmap", "Grid heat map of location history");
  heatmap->add_option("--traces", f.traces, "Trace CSV")->required();
  heatmap->add_option("--mode", f.mode, "single | multi")->capture_default_str();
  heatmap->add_option("--user", f.user, "User id for --mode single");
  heatmap->add_option("--k-min", f.k_min, "Minimum distinct users per emitted cell (multi)")
      ->capture_default_str();
  heatmap->add_option("--cell-size", f.cell_size, "Cell edge in meters")->capture_default_str();
  heatmap->add_option("--coarsen", f.coarsen, "Merge NxN cell blocks")->capture_default_str();
  heatmap->add_option("--window-days", f.window_days, "Retention window in days")
      ->capture_default_str();
  heatmap->add_option("--now", f.now, "Reference time for retention (default: latest record)");
  heatmap->add_option("--zones", f.zones, "Zone GeoJSON (private redacted, danger alerted)");
  heatmap->add_option("--out", f.out, "Heat map GeoJSON output")->required();
  heatmap->add_option("--alerts-out", f.alerts_out,
                      "Danger alerts CSV (default: <out>.alerts.csv)");
  AddSeed(heatmap, f);
  heatmap->callback([&] { f.command = "heatmap"; });

  auto* simulate = app.add_subcommand("simulate", "Generate random-waypoint traces");
  simulate->add_option("--population", f.population, "Block-group GeoJSON world")
      ->required();
  simulate->add_option("--users", f.users, "Number of users")->capture_default_str();
  simulate->add_option("--infected-count", f.n_infected, "Users u00000.. marked infected")
      ->capture_default_str();
  simulate->add_option("--hours", f.hours, "Duration in hours")->capture_default_str();
  simulate->add_option("--step-minutes", f.step_minutes, "Minutes between records")
      ->capture_default_str();
  simulate->add_option("--speed", f.speed, "Walking speed in m/s")->capture_default_str();
  simulate->add_option("--start", f.start, "Start time, ISO-8601 UTC (default 2021-01-01T00:00:00Z)");
  simulate->add_option("--out", f.out, "Trace CSV output")->required();
  simulate->add_option("--infected-out", f.infected_out, "Write infected user ids, one per line");
  AddSeed(simulate, f);
  simulate->callback([&] { f.command = "simulate"; });

  auto* sweep = app.add_subcommand("sweep", "Privacy/utility table over a parameter grid");
  sweep->add_option("--traces", f.traces, "Raw trace CSV")->required();
  sweep->add_option("--population", f.population, "Block-group GeoJSON")
      ->required();
  sweep->add_option("--mechanism", f.mechanism, "gaussian-skew | planar-laplace")
      ->capture_default_str();
  sweep->add_option("--grid", f.grid, "Parameter grid, e.g. c=50,100,200,400 or epsilon=0.01,0.1")
      ->required();
  sweep->add_option("--infected", f.infected, "Comma-separated infected user ids");
  sweep->add_option("--infected-file", f.infected_file, "Infected user ids, one per line");
  sweep->add_option("--ages", f.ages, "Age bracket sidecar CSV");
  sweep->add_option("--am", f.am, "Age multiplier weight AM in [0, 1]")->capture_default_str();
  sweep->add_option("--min-displacement", f.min_displacement, "Minimum displacement in meters")
      ->capture_default_str();
  sweep->add_option("--radius", f.radius, "Nominal radius r in meters (planar-laplace)")
      ->capture_default_str();
  sweep->add_option("--d-max", f.d_max, "Contact distance in meters")->capture_default_str();
  sweep->add_option("--t-window", f.t_window, "Contact time window in seconds")
      ->capture_default_str();
  sweep->add_option("--k-target", f.k_target, "Anonymity target k")->capture_default_str();
  sweep->add_option("--max-eval-points", f.max_eval_points,
                    "Records (evenly strided) used for k per row; 0 = all")
      ->capture_default_str();
  sweep->add_option("--out", f.out, "Sweep CSV output")->required();
  AddHomes(sweep, f);
  AddSeed(sweep, f);
  sweep->callback([&] { f.command = "sweep"; });

  std::vector<std::string> expanded;
  try {
    expanded = ExpandConfig(args);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    // Subcommand help is easier to read than the top-level listing.
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kExitValidation;
  }

  try {
    if (f.command == "mask") return CmdMask(f, err);
    if (f.command == "evaluate") return CmdEvaluate(f, err);
    if (f.command == "calibrate") return CmdCalibrate(f, err);
    if (f.command == "heatmap") return CmdHeatmap(f, err);
    if (f.command == "simulate") return CmdSimulate(f, err);
    if (f.command == "sweep") return CmdSweep(f, err);
    err << app.help();
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kIo ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace geomask::cli
