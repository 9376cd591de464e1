// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>

#include <json.hpp>

#include "epikick/analysis.hpp"
#include "epikick/csv.hpp"
#include "epikick/error.hpp"
#include "epikick/forecast.hpp"
#include "epikick/synth.hpp"
#include "epikick/train.hpp"

namespace epikick {

namespace fs = std::filesystem;

namespace {

std::string path_in(const fs::path& dir, const char* name) { return (dir / name).string(); }

void prepare_dir(const RunConfig& config, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  csv::write_file(path_in(dir, "effective-config"), config.to_text());
}

void require_path(const std::string& value, const char* key) {
  if (value.empty()) throw UsageError(std::string("missing required setting '") + key + "'");
}

TimelineMap load_timelines(const RunConfig& config, const CaseMap& cases) {
  if (config.restrictions.empty()) return build_timelines({}, cases);
  return load_restrictions(config.restrictions, cases);
}

DatasetOptions dataset_options(const RunConfig& config) {
  DatasetOptions options;
  options.window_len = config.model.window_len;
  options.test_regions = config.test_regions;
  options.eval_fraction = config.eval_fraction;
  options.seed = config.split_seed();
  return options;
}

TrainConfig train_config(const RunConfig& config) {
  TrainConfig tc = config.train;
  tc.seed = config.train_seed();
  return tc;
}

std::size_t date_index(const NormalizedSeries& series, const std::string& text) {
  const Date date = Date::parse(text);
  const auto offset = date - series.start;
  if (offset < 0 || static_cast<std::size_t>(offset) >= series.cc.size()) {
    throw ValidationError("origin " + text + " is outside the observed range of " +
                          series.region);
  }
  return static_cast<std::size_t>(offset);
}

}  // namespace

fs::path resolve_run_dir(const RunConfig& config) {
  if (!config.out.empty()) return fs::path(config.out);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  const std::string base = std::string("runs/") + stamp + "-seed" + std::to_string(config.seed);
  fs::path dir(base);
  for (int k = 2; fs::exists(dir); ++k) dir = fs::path(base + "-" + std::to_string(k));
  return dir;
}

Dataset load_dataset(const RunConfig& config) {
  require_path(config.cases, "cases");
  require_path(config.demographics, "demographics");
  const CaseMap cases = load_cases(config.cases);
  const TimelineMap timelines = load_timelines(config, cases);
  const DemographicMap demographics = load_demographics(config.demographics);
  return assemble_dataset(cases, timelines, demographics, dataset_options(config));
}

RegionData region_for_checkpoint(const Checkpoint& ckpt, const CaseMap& cases,
                                 const TimelineMap& timelines,
                                 const DemographicMap& demographics, const std::string& region) {
  const auto series = cases.find(region);
  if (series == cases.end()) throw ValidationError("region " + region + " has no case data");
  const auto demo = demographics.find(region);
  if (demo == demographics.end()) {
    throw ValidationError("region " + region + " has no demographics row");
  }
  if (demo->second.names != ckpt.feature_names) {
    throw ValidationError("demographic features of " + region +
                          " do not match the checkpoint (" +
                          std::to_string(demo->second.names.size()) + " columns vs " +
                          std::to_string(ckpt.feature_names.size()) + ")");
  }
  if (!demo->second.population) {
    throw ValidationError("region " + region + " has no population");
  }
  RegionData out;
  out.series = normalize(series->second, *demo->second.population);
  out.timeline = timelines.at(region);
  out.demo = ckpt.stats.apply(demo->second.values);
  return out;
}

std::vector<std::pair<Date, bool>> load_scenario(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"date", "restricted"}) {
    throw ValidationError(path + ": expected header 'date,restricted'");
  }
  std::vector<std::pair<Date, bool>> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.fields.size() != 2) {
      throw ValidationError(path + ": line " + std::to_string(row.line) + ": expected 2 fields");
    }
    const auto flag = csv::parse_int(row.fields[1], row.line, "restricted");
    if (flag != 0 && flag != 1) {
      throw ValidationError(path + ": line " + std::to_string(row.line) +
                            ": restricted must be 0 or 1");
    }
    out.emplace_back(Date::parse(row.fields[0]), flag == 1);
  }
  return out;
}

void cmd_simulate(const RunConfig& config, const fs::path& dir) {
  SynthConfig sc = config.sim;
  sc.seed = config.seed;
  const SynthData data = synth_dataset(sc);
  prepare_dir(config, dir);
  write_cases(path_in(dir, "cases.csv"), data.cases);
  write_restrictions(path_in(dir, "restrictions.csv"), data.restrictions);
  write_demographics(path_in(dir, "demographics.csv"), data.demographics);
}

void cmd_train(const RunConfig& config, const fs::path& dir) {
  const Dataset dataset = load_dataset(config);
  ModelConfig mc = config.model;
  mc.input_dim = kInputChannels;
  mc.demo_dim = dataset.feature_names.size();
  prepare_dir(config, dir);
  TrainResult result;
  try {
    result = train(dataset.split.train, dataset.split.eval, dataset.demo_lookup(), mc,
                   train_config(config));
  } catch (const TrainingError& e) {
    csv::write_file(path_in(dir, "history.csv"), history_csv(e.history()));
    throw;
  }
  csv::write_file(path_in(dir, "history.csv"), history_csv(result.history));
  save_checkpoint(path_in(dir, "checkpoint.json"),
                  Checkpoint{std::move(result.params), dataset.feature_names, dataset.stats});
}

void cmd_evaluate(const RunConfig& config, const fs::path& dir) {
  require_path(config.checkpoint, "checkpoint");
  require_path(config.cases, "cases");
  require_path(config.demographics, "demographics");
  const std::string bytes = read_text_file(config.checkpoint);
  const Checkpoint ckpt = parse_checkpoint(bytes);
  const CaseMap cases = load_cases(config.cases);
  const TimelineMap timelines = load_timelines(config, cases);
  const DemographicMap demographics = load_demographics(config.demographics);
  const std::size_t L = ckpt.params.config.window_len;

  nlohmann::json regions = nlohmann::json::array();
  double total = 0.0;
  for (const auto& name : config.test_regions) {
    const RegionData region = region_for_checkpoint(ckpt, cases, timelines, demographics, name);
    const auto samples = build_windows(region.series, region.timeline, L);
    if (samples.empty()) {
      throw ValidationError("region " + name + " is too short for window length " +
                            std::to_string(L));
    }
    const double r = evaluate_rmse(ckpt.params, samples, {{name, region.demo}});
    total += r;
    regions.push_back({{"region", name},
                       {"samples", samples.size()},
                       {"rmse", r},
                       {"rmse_counts", r * region.series.population}});
  }
  const nlohmann::json doc{
      {"checkpoint_id", content_id(bytes)},
      {"metric", "one_step_rmse"},
      {"regions", regions},
      {"mean_rmse", regions.empty() ? 0.0 : total / static_cast<double>(regions.size())}};
  prepare_dir(config, dir);
  csv::write_file(path_in(dir, "metrics.json"), doc.dump(2) + "\n");
}

void cmd_forecast(const RunConfig& config, const fs::path& dir) {
  require_path(config.checkpoint, "checkpoint");
  require_path(config.cases, "cases");
  require_path(config.demographics, "demographics");
  if (config.horizon < 1) throw UsageError("--horizon must be at least 1");
  const Checkpoint ckpt = load_checkpoint(config.checkpoint);
  const CaseMap cases = load_cases(config.cases);
  const TimelineMap timelines = load_timelines(config, cases);
  const DemographicMap demographics = load_demographics(config.demographics);
  const ForecastMode mode = parse_forecast_mode(config.mode);
  const std::vector<std::string> names =
      config.region.empty() ? config.test_regions : std::vector<std::string>{config.region};

  std::map<Date, bool> scenario;
  if (!config.scenario.empty()) {
    for (const auto& [date, flag] : load_scenario(config.scenario)) scenario[date] = flag;
  }

  BootstrapEnsemble ensemble;
  if (config.bootstrap) {
    BootstrapConfig boot = config.boot;
    boot.seed = config.bootstrap_seed();
    boot.validate();
    const Dataset dataset = load_dataset(config);
    ensemble = train_bootstrap_ensemble(dataset, ckpt.params.config, train_config(config), boot);
  }

  std::vector<ForecastResult> results;
  for (const auto& name : names) {
    const RegionData region = region_for_checkpoint(ckpt, cases, timelines, demographics, name);
    const std::size_t T = region.series.cc.size();
    ForecastRequest request;
    request.mode = mode;
    request.horizon = config.horizon;
    if (!config.origin.empty()) {
      request.origin = date_index(region.series, config.origin);
    } else {
      if (T < config.horizon + 1) {
        throw ValidationError("region " + name + " has " + std::to_string(T) +
                              " days, too few for horizon " + std::to_string(config.horizon));
      }
      request.origin = T - 1 - config.horizon;
    }
    if (!scenario.empty()) {
      for (std::size_t h = 1; h <= config.horizon; ++h) {
        const Date day = region.series.start + static_cast<std::int32_t>(request.origin + h);
        const auto it = scenario.find(day);
        if (it == scenario.end()) {
          throw ValidationError("scenario has no restriction status for " + day.iso());
        }
        request.future_status.push_back(it->second);
      }
    }
    ForecastResult result =
        config.bootstrap
            ? forecast_with_bands(ckpt.params, ensemble, region, request, config.boot.level)
            : run_forecast(ckpt.params, region, request);
    result.region = name;
    results.push_back(std::move(result));
  }
  prepare_dir(config, dir);
  csv::write_file(path_in(dir, "forecast.csv"), forecast_csv(results));
  csv::write_file(path_in(dir, "forecast-diagnostics.csv"), forecast_diagnostics_csv(results));
}

void cmd_relevance(const RunConfig& config, const fs::path& dir) {
  require_path(config.checkpoint, "checkpoint");
  const std::string bytes = read_text_file(config.checkpoint);
  const RelevanceReport report = relevance(parse_checkpoint(bytes), content_id(bytes));
  prepare_dir(config, dir);
  emit_report(report, path_in(dir, "relevance.csv"), path_in(dir, "relevance.json"));
}

}  // namespace epikick
