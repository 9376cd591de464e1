// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "epikick/checkpoint.hpp"
#include "epikick/config.hpp"
#include "epikick/data.hpp"

namespace epikick {

/// `config.out` when set, otherwise runs/<UTC timestamp>-seed<N>.
std::filesystem::path resolve_run_dir(const RunConfig& config);

/// Loads the three input files named in `config` and assembles the dataset.
Dataset load_dataset(const RunConfig& config);

/// Region data for `region`, standardized with the checkpoint's stats.
/// Throws ValidationError when the demographics file does not carry the
/// checkpoint's features.
RegionData region_for_checkpoint(const Checkpoint& ckpt, const CaseMap& cases,
                                 const TimelineMap& timelines,
                                 const DemographicMap& demographics, const std::string& region);

/// Each command writes its outputs plus `effective-config` into `dir`,
/// creating it if needed.
///
///   simulate:  cases.csv, restrictions.csv, demographics.csv
///   train:     checkpoint.json, history.csv
///   evaluate:  metrics.json
///   forecast:  forecast.csv, forecast-diagnostics.csv
///   relevance: relevance.csv, relevance.json
void cmd_simulate(const RunConfig& config, const std::filesystem::path& dir);
void cmd_train(const RunConfig& config, const std::filesystem::path& dir);
void cmd_evaluate(const RunConfig& config, const std::filesystem::path& dir);
void cmd_forecast(const RunConfig& config, const std::filesystem::path& dir);
void cmd_relevance(const RunConfig& config, const std::filesystem::path& dir);

/// Restriction scenario for forecasting: `date,restricted` rows with 0/1.
std::vector<std::pair<Date, bool>> load_scenario(const std::string& path);

}  // namespace epikick
