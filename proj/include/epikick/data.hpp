// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epikick/matrix.hpp"
#include "epikick/rng.hpp"
#include "epikick/series.hpp"

namespace epikick {

using CaseMap = std::map<std::string, EpidemicSeries>;
using TimelineMap = std::map<std::string, RestrictionTimeline>;
using DemographicMap = std::map<std::string, DemographicVector>;

// ---------------------------------------------------------------------------
// Loaders
//
// cases:         region,date,cumulative_confirmed[,cumulative_deaths]
// restrictions:  region,restriction_start,restriction_end
// demographics:  region,<feature_1>,...,<feature_D>   (optional `population`)

CaseMap parse_cases(std::istream& in);
CaseMap load_cases(const std::string& path);

/// One stay-at-home interval, inclusive on both ends. A missing start means
/// "from the first observed day"; a missing end means "through the last".
struct RestrictionInterval {
  std::string region;
  std::optional<Date> start;
  std::optional<Date> end;
};

std::vector<RestrictionInterval> parse_restriction_intervals(std::istream& in);
/// Expands intervals onto each series' days. Regions without rows are
/// unrestricted throughout; rows for unknown regions are rejected.
TimelineMap build_timelines(const std::vector<RestrictionInterval>& intervals,
                            const CaseMap& series);
TimelineMap load_restrictions(const std::string& path, const CaseMap& series);

DemographicMap parse_demographics(std::istream& in);
DemographicMap load_demographics(const std::string& path);

void write_cases(const std::string& path, const CaseMap& cases);
void write_restrictions(const std::string& path,
                        const std::vector<RestrictionInterval>& intervals);
void write_demographics(const std::string& path, const DemographicMap& demographics);

// ---------------------------------------------------------------------------
// Normalization

NormalizedSeries normalize(const EpidemicSeries& series, double population);
/// Inverse of normalize, rounded to the nearest count.
EpidemicSeries denormalize(const NormalizedSeries& series);

/// Per-feature z-score parameters fitted on training regions.
struct StandardizationStats {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<std::string> warnings;

  std::vector<double> apply(const std::vector<double>& values) const;
};

/// Fits mean and population standard deviation per feature over `vectors`
/// (at least two). A zero-variance feature keeps scale 1 and records a warning.
StandardizationStats fit_standardization(const std::vector<const DemographicVector*>& vectors);

struct StandardizedDemographics {
  std::map<std::string, std::vector<double>> values;
  StandardizationStats stats;
};

StandardizedDemographics standardize_demographics(
    const std::vector<const DemographicVector*>& vectors);

// ---------------------------------------------------------------------------
// Windows and splits

/// Column order of the double-channel input block.
enum Channel : std::size_t { kCcRestricted = 0, kDcRestricted = 1, kCcOpen = 2, kDcOpen = 3 };
inline constexpr std::size_t kInputChannels = 4;

/// Writes one normalized day into a row of the input block, routing it to
/// the restricted or the unrestricted channel pair.
void route_row(std::span<double> row, double cc, double dc, bool restricted);

struct WindowSample {
  std::string region;
  Matrix inputs;  // L x 4
  double target = 0.0;
  Date target_date;
};

/// Sliding windows of length L; sample k covers days [k, k + L) and targets
/// dc on day k + L. Returns an empty list when the series is too short.
std::vector<WindowSample> build_windows(const NormalizedSeries& series,
                                        const RestrictionTimeline& timeline, std::size_t L);

/// The window of length L ending at day `last` (inclusive).
Matrix window_ending_at(const NormalizedSeries& series, const RestrictionTimeline& timeline,
                        std::size_t last, std::size_t L);

struct DatasetSplit {
  std::vector<WindowSample> train;
  std::vector<WindowSample> eval;
  std::vector<std::string> test_regions;
};

/// Holds test regions out whole, shuffles the rest with `rng` and moves
/// floor(n * eval_fraction) samples to the eval pool.
DatasetSplit split_dataset(const std::map<std::string, std::vector<WindowSample>>& samples,
                           const std::vector<std::string>& test_regions, double eval_fraction,
                           Rng& rng);

/// Everything the trainer and forecaster need about one region.
struct RegionData {
  NormalizedSeries series;
  RestrictionTimeline timeline;
  std::vector<double> demo;  // standardized with training-region stats
};

struct Dataset {
  std::map<std::string, RegionData> regions;
  std::vector<std::string> feature_names;
  StandardizationStats stats;
  DatasetSplit split;
  std::size_t window_len = 5;

  std::map<std::string, std::vector<double>> demo_lookup() const;
};

struct DatasetOptions {
  std::size_t window_len = 5;
  std::vector<std::string> test_regions;
  double eval_fraction = 0.2;
  std::uint64_t seed = 0;
};

/// Validates cross-file consistency, normalizes, standardizes demographics
/// over the non-test regions, windows every region and splits.
Dataset assemble_dataset(const CaseMap& cases, const TimelineMap& timelines,
                         const DemographicMap& demographics, const DatasetOptions& options);

}  // namespace epikick
