// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "epikick/csv.hpp"
#include "epikick/error.hpp"

namespace epikick {

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void expect_header(const csv::Row& row, const std::vector<std::string>& required,
                   const char* file_kind) {
  bool ok = row.fields.size() >= required.size();
  for (std::size_t i = 0; ok && i < required.size(); ++i) ok = row.fields[i] == required[i];
  if (!ok) {
    std::string expected;
    for (const auto& name : required) expected += (expected.empty() ? "" : ",") + name;
    throw ValidationError(std::string(file_kind) + " CSV: header must start with '" + expected +
                          "'");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cases

CaseMap parse_cases(std::istream& in) {
  const auto rows = csv::read(in);
  CaseMap out;
  if (rows.empty()) return out;

  const auto& header = rows.front();
  expect_header(header, {"region", "date", "cumulative_confirmed"}, "cases");
  const std::size_t width = header.fields.size();
  if (width > 4 || (width == 4 && header.fields[3] != "cumulative_deaths")) {
    throw ValidationError("cases CSV: unexpected columns after cumulative_confirmed");
  }

  struct Pending {
    Date start;
    Date last;
    std::vector<std::int64_t> cc;
  };
  std::map<std::string, Pending> pending;
  std::string current;

  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.fields.size() != width) {
      throw ValidationError(at_line(row.line) + "expected " + std::to_string(width) +
                            " fields, found " + std::to_string(row.fields.size()));
    }
    const std::string& region = row.fields[0];
    if (region.empty()) throw ValidationError(at_line(row.line) + "empty region");
    Date date;
    try {
      date = Date::parse(row.fields[1]);
    } catch (const ValidationError& e) {
      throw ValidationError(at_line(row.line) + e.what());
    }
    const auto cc = csv::parse_int(row.fields[2], row.line, "cumulative_confirmed");
    if (cc < 0) {
      throw ValidationError("region " + region + ": negative cumulative count on " + date.iso());
    }

    auto it = pending.find(region);
    if (it == pending.end()) {
      pending.emplace(region, Pending{date, date, {cc}});
      current = region;
      continue;
    }
    if (region != current) {
      throw ValidationError(at_line(row.line) + "rows for region " + region +
                            " are not contiguous (file must be sorted by region then date)");
    }
    Pending& p = it->second;
    if (date <= p.last) {
      throw ValidationError("region " + region + ": dates out of order at " + date.iso());
    }
    if (date - p.last != 1) {
      throw ValidationError("region " + region + ": date gap between " + p.last.iso() + " and " +
                            date.iso());
    }
    if (cc < p.cc.back()) {
      throw ValidationError("region " + region + ": cumulative confirmed decreases on " +
                            date.iso());
    }
    p.cc.push_back(cc);
    p.last = date;
  }

  for (auto& [region, p] : pending) {
    out.emplace(region, EpidemicSeries::from_cumulative(region, p.start, std::move(p.cc)));
  }
  return out;
}

CaseMap load_cases(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_cases(in);
}

void write_cases(const std::string& path, const CaseMap& cases) {
  std::ostringstream out;
  out << "region,date,cumulative_confirmed,cumulative_deaths\n";
  for (const auto& [region, series] : cases) {
    for (std::size_t t = 0; t < series.length(); ++t) {
      out << region << ',' << series.date_at(t).iso() << ',' << series.cc[t] << ",\n";
    }
  }
  csv::write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Restrictions

std::vector<RestrictionInterval> parse_restriction_intervals(std::istream& in) {
  const auto rows = csv::read(in);
  std::vector<RestrictionInterval> out;
  if (rows.empty()) return out;
  expect_header(rows.front(), {"region", "restriction_start", "restriction_end"}, "restrictions");
  if (rows.front().fields.size() != 3) {
    throw ValidationError("restrictions CSV: expected exactly 3 columns");
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.fields.size() != 3) {
      throw ValidationError(at_line(row.line) + "expected 3 fields, found " +
                            std::to_string(row.fields.size()));
    }
    RestrictionInterval interval{row.fields[0], std::nullopt, std::nullopt};
    try {
      if (!row.fields[1].empty()) interval.start = Date::parse(row.fields[1]);
      if (!row.fields[2].empty()) interval.end = Date::parse(row.fields[2]);
    } catch (const ValidationError& e) {
      throw ValidationError(at_line(row.line) + e.what());
    }
    if (interval.start && interval.end && *interval.end < *interval.start) {
      throw ValidationError(at_line(row.line) + "region " + interval.region +
                            ": restriction_end " + interval.end->iso() +
                            " is before restriction_start " + interval.start->iso());
    }
    out.push_back(std::move(interval));
  }
  return out;
}

TimelineMap build_timelines(const std::vector<RestrictionInterval>& intervals,
                            const CaseMap& series) {
  TimelineMap out;
  for (const auto& [region, s] : series) {
    out.emplace(region, RestrictionTimeline{region, std::vector<bool>(s.length(), false)});
  }
  for (const auto& interval : intervals) {
    if (interval.start && interval.end && *interval.end < *interval.start) {
      throw ValidationError("region " + interval.region + ": restriction ends before it starts");
    }
    auto it = series.find(interval.region);
    if (it == series.end()) {
      throw ValidationError("restrictions reference region " + interval.region +
                            " which has no case data");
    }
    // Both ends empty is the "never restricted" marker row.
    if (!interval.start && !interval.end) continue;
    const EpidemicSeries& s = it->second;
    auto& status = out[interval.region].status;
    for (std::size_t t = 0; t < s.length(); ++t) {
      const Date d = s.date_at(t);
      const bool after_start = !interval.start || d >= *interval.start;
      const bool before_end = !interval.end || d <= *interval.end;
      if (after_start && before_end) status[t] = true;
    }
  }
  return out;
}

TimelineMap load_restrictions(const std::string& path, const CaseMap& series) {
  auto in = open_or_throw(path);
  return build_timelines(parse_restriction_intervals(in), series);
}

void write_restrictions(const std::string& path,
                        const std::vector<RestrictionInterval>& intervals) {
  std::ostringstream out;
  out << "region,restriction_start,restriction_end\n";
  for (const auto& interval : intervals) {
    out << interval.region << ',' << (interval.start ? interval.start->iso() : "") << ','
        << (interval.end ? interval.end->iso() : "") << '\n';
  }
  csv::write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Demographics

DemographicMap parse_demographics(std::istream& in) {
  const auto rows = csv::read(in);
  DemographicMap out;
  if (rows.empty()) return out;
  const auto& header = rows.front();
  if (header.fields.empty() || header.fields[0] != "region") {
    throw ValidationError("demographics CSV: first column must be 'region'");
  }

  std::optional<std::size_t> population_col;
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    const auto& name = header.fields[c];
    if (name.empty()) throw ValidationError("demographics CSV: empty column name");
    if (!seen.insert(name).second) {
      throw ValidationError("demographics CSV: duplicate column '" + name + "'");
    }
    if (name == "population") {
      population_col = c;
    } else {
      names.push_back(name);
    }
  }
  if (names.empty()) throw ValidationError("demographics CSV: no feature columns");

  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.fields.size() != header.fields.size()) {
      throw ValidationError("demographics CSV: row " + std::to_string(row.line) + " has " +
                            std::to_string(row.fields.size()) + " fields, header has " +
                            std::to_string(header.fields.size()));
    }
    DemographicVector v{row.fields[0], names, {}, std::nullopt};
    v.values.reserve(names.size());
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      const double x = csv::parse_double(row.fields[c], row.line, header.fields[c]);
      if (population_col && c == *population_col) {
        if (x < 1.0) {
          throw ValidationError("demographics CSV: row " + std::to_string(row.line) +
                                " population must be >= 1");
        }
        v.population = x;
      } else {
        v.values.push_back(x);
      }
    }
    if (!out.emplace(v.region, v).second) {
      throw ValidationError("demographics CSV: row " + std::to_string(row.line) +
                            " duplicates region " + v.region);
    }
  }
  return out;
}

DemographicMap load_demographics(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_demographics(in);
}

void write_demographics(const std::string& path, const DemographicMap& demographics) {
  std::ostringstream out;
  out << "region";
  const bool with_population =
      !demographics.empty() && demographics.begin()->second.population.has_value();
  if (with_population) out << ",population";
  if (!demographics.empty()) {
    for (const auto& name : demographics.begin()->second.names) out << ',' << name;
  }
  out << '\n';
  for (const auto& [region, v] : demographics) {
    out << region;
    if (with_population) out << ',' << csv::format_double(v.population.value_or(1.0));
    for (double x : v.values) out << ',' << csv::format_double(x);
    out << '\n';
  }
  csv::write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Normalization

NormalizedSeries normalize(const EpidemicSeries& series, double population) {
  if (!(population >= 1.0)) throw UsageError("normalize: population must be >= 1");
  NormalizedSeries out{series.region, series.start, population, {}, {}};
  out.cc.reserve(series.length());
  out.dc.reserve(series.length());
  for (std::size_t t = 0; t < series.length(); ++t) {
    out.cc.push_back(static_cast<double>(series.cc[t]) / population);
    out.dc.push_back(static_cast<double>(series.dc[t]) / population);
  }
  return out;
}

EpidemicSeries denormalize(const NormalizedSeries& series) {
  EpidemicSeries out{series.region, series.start, {}, {}};
  for (std::size_t t = 0; t < series.length(); ++t) {
    out.cc.push_back(std::llround(series.cc[t] * series.population));
    out.dc.push_back(std::llround(series.dc[t] * series.population));
  }
  return out;
}

std::vector<double> StandardizationStats::apply(const std::vector<double>& values) const {
  if (values.size() != mean.size()) {
    throw ValidationError("demographic vector has " + std::to_string(values.size()) +
                          " features, expected " + std::to_string(mean.size()));
  }
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) out[j] = (values[j] - mean[j]) / scale[j];
  return out;
}

StandardizationStats fit_standardization(const std::vector<const DemographicVector*>& vectors) {
  if (vectors.size() < 2) {
    throw ValidationError("standardization needs at least 2 regions, got " +
                          std::to_string(vectors.size()));
  }
  const auto& names = vectors.front()->names;
  const std::size_t d = names.size();
  StandardizationStats stats{names, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), {}};
  for (const auto* v : vectors) {
    if (v->names != names || v->values.size() != d) {
      throw ValidationError("region " + v->region + " has a different demographic schema");
    }
  }
  const double n = static_cast<double>(vectors.size());
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (const auto* v : vectors) sum += v->values[j];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto* v : vectors) ss += (v->values[j] - mean) * (v->values[j] - mean);
    const double sd = std::sqrt(ss / n);
    stats.mean[j] = mean;
    if (sd > 0.0) {
      stats.scale[j] = sd;
    } else {
      stats.warnings.push_back("feature '" + names[j] +
                               "' has zero variance across training regions; left centered "
                               "with unit scale");
    }
  }
  return stats;
}

StandardizedDemographics standardize_demographics(
    const std::vector<const DemographicVector*>& vectors) {
  StandardizedDemographics out{{}, fit_standardization(vectors)};
  for (const auto* v : vectors) out.values.emplace(v->region, out.stats.apply(v->values));
  return out;
}

// ---------------------------------------------------------------------------
// Windows

void route_row(std::span<double> row, double cc, double dc, bool restricted) {
  row[kCcRestricted] = restricted ? cc : 0.0;
  row[kDcRestricted] = restricted ? dc : 0.0;
  row[kCcOpen] = restricted ? 0.0 : cc;
  row[kDcOpen] = restricted ? 0.0 : dc;
}

Matrix window_ending_at(const NormalizedSeries& series, const RestrictionTimeline& timeline,
                        std::size_t last, std::size_t L) {
  if (L == 0) throw UsageError("window length must be at least 1");
  if (last + 1 < L || last >= series.length()) {
    throw UsageError("window of length " + std::to_string(L) + " ending at day " +
                     std::to_string(last) + " does not fit series " + series.region);
  }
  if (timeline.status.size() != series.length()) {
    throw ValidationError("region " + series.region + ": restriction timeline has " +
                          std::to_string(timeline.status.size()) + " days, series has " +
                          std::to_string(series.length()));
  }
  Matrix inputs(L, kInputChannels);
  const std::size_t first = last + 1 - L;
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t t = first + i;
    route_row(inputs.row(i), series.cc[t], series.dc[t], timeline.status[t]);
  }
  return inputs;
}

std::vector<WindowSample> build_windows(const NormalizedSeries& series,
                                        const RestrictionTimeline& timeline, std::size_t L) {
  if (L == 0) throw UsageError("window length must be at least 1");
  std::vector<WindowSample> out;
  const std::size_t T = series.length();
  if (T <= L) return out;
  out.reserve(T - L);
  for (std::size_t k = 0; k + L < T; ++k) {
    out.push_back(WindowSample{series.region, window_ending_at(series, timeline, k + L - 1, L),
                               series.dc[k + L], series.date_at(k + L)});
  }
  return out;
}

DatasetSplit split_dataset(const std::map<std::string, std::vector<WindowSample>>& samples,
                           const std::vector<std::string>& test_regions, double eval_fraction,
                           Rng& rng) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw UsageError("eval_fraction must lie in (0, 1)");
  }
  const std::set<std::string> held_out(test_regions.begin(), test_regions.end());
  for (const auto& region : held_out) {
    if (!samples.contains(region)) {
      throw ValidationError("unknown test region '" + region + "'");
    }
  }

  std::vector<const WindowSample*> pool;
  for (const auto& [region, list] : samples) {
    if (held_out.contains(region)) continue;
    for (const auto& s : list) pool.push_back(&s);
  }
  rng.shuffle(std::span(pool));

  // The epsilon keeps products like 100 * 0.29 from flooring one short.
  const auto n_eval = static_cast<std::size_t>(
      std::floor(static_cast<double>(pool.size()) * eval_fraction + 1e-9));
  DatasetSplit split;
  split.test_regions.assign(held_out.begin(), held_out.end());
  split.eval.reserve(n_eval);
  split.train.reserve(pool.size() - n_eval);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    (k < n_eval ? split.eval : split.train).push_back(*pool[k]);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Assembly

std::map<std::string, std::vector<double>> Dataset::demo_lookup() const {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [region, data] : regions) out.emplace(region, data.demo);
  return out;
}

Dataset assemble_dataset(const CaseMap& cases, const TimelineMap& timelines,
                         const DemographicMap& demographics, const DatasetOptions& options) {
  const std::set<std::string> held_out(options.test_regions.begin(), options.test_regions.end());
  for (const auto& region : held_out) {
    if (!cases.contains(region)) throw ValidationError("unknown test region '" + region + "'");
  }

  std::vector<const DemographicVector*> fit_on;
  for (const auto& [region, series] : cases) {
    auto it = demographics.find(region);
    if (it == demographics.end()) {
      throw ValidationError("region " + region + " appears in case data but has no demographics");
    }
    if (!it->second.population) {
      throw ValidationError("region " + region + " has no population in the demographics file");
    }
    if (!timelines.contains(region)) {
      throw ValidationError("region " + region + " has no restriction timeline");
    }
    if (!held_out.contains(region)) fit_on.push_back(&it->second);
  }

  Dataset ds;
  ds.window_len = options.window_len;
  ds.stats = fit_standardization(fit_on);
  ds.feature_names = ds.stats.names;

  std::map<std::string, std::vector<WindowSample>> samples;
  for (const auto& [region, series] : cases) {
    const DemographicVector& demo = demographics.at(region);
    if (demo.names != ds.feature_names) {
      throw ValidationError("region " + region + " has a different demographic schema");
    }
    RegionData rd{normalize(series, *demo.population), timelines.at(region),
                  ds.stats.apply(demo.values)};
    samples.emplace(region, build_windows(rd.series, rd.timeline, options.window_len));
    ds.regions.emplace(region, std::move(rd));
  }

  Rng rng(options.seed);
  ds.split = split_dataset(samples, options.test_regions, options.eval_fraction, rng);
  return ds;
}

}  // namespace epikick
