// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/forecast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "epikick/csv.hpp"
#include "epikick/error.hpp"

namespace epikick {

namespace {

void check_demo(const ModelParams& params, std::span<const double> demo) {
  if (demo.size() != params.config.demo_dim) {
    throw ValidationError("demographic vector has " + std::to_string(demo.size()) +
                          " features but the checkpoint expects " +
                          std::to_string(params.config.demo_dim));
  }
}

void check_origin(const ModelParams& params, const RegionData& region, std::size_t origin,
                  std::size_t horizon) {
  const std::size_t L = params.config.window_len;
  if (horizon < 1) throw UsageError("forecast horizon must be at least 1");
  if (origin >= region.series.length() || origin + 1 < L) {
    throw UsageError("forecast origin " + std::to_string(origin) + " leaves no full " +
                     std::to_string(L) + "-day window in region " + region.series.region +
                     " (series length " + std::to_string(region.series.length()) + ")");
  }
}

ForecastPoint make_point(Date date, double raw, double population, double cc_norm) {
  ForecastPoint p;
  p.date = date;
  p.dc_raw = raw * population;
  p.dc_pred = std::max(raw, 0.0) * population;
  p.cc_implied = cc_norm * population;
  return p;
}

}  // namespace

std::string to_string(ForecastMode mode) {
  return mode == ForecastMode::OneStep ? "onestep" : "autoregressive";
}

ForecastMode parse_forecast_mode(std::string_view text) {
  if (text == "onestep") return ForecastMode::OneStep;
  if (text == "autoregressive") return ForecastMode::Autoregressive;
  throw UsageError("unknown forecast mode '" + std::string(text) +
                   "' (expected onestep or autoregressive)");
}

double predict_normalized(const ModelParams& params, const Matrix& window,
                          std::span<const double> demo) {
  check_demo(params, demo);
  return predict(window, demo, params);
}

double predict_one_step(const ModelParams& params, const Matrix& window,
                        std::span<const double> demo, double population) {
  return std::max(predict_normalized(params, window, demo), 0.0) * population;
}

ForecastResult forecast_one_step(const ModelParams& params, const RegionData& region,
                                 std::size_t origin, std::size_t horizon) {
  check_origin(params, region, origin, horizon);
  const auto& s = region.series;
  if (origin + horizon > s.length()) {
    throw UsageError("one-step forecast needs observed history through day " +
                     std::to_string(origin + horizon - 1) + " but region " + s.region + " has " +
                     std::to_string(s.length()) + " days");
  }
  const std::size_t L = params.config.window_len;
  ForecastResult out{s.region, ForecastMode::OneStep, {}, {}};
  double cc = s.cc[origin];
  for (std::size_t h = 1; h <= horizon; ++h) {
    const std::size_t last = origin + h - 1;
    const double raw =
        predict_normalized(params, window_ending_at(s, region.timeline, last, L), region.demo);
    cc += std::max(raw, 0.0);
    out.points.push_back(make_point(s.date_at(origin + h), raw, s.population, cc));
  }
  return out;
}

ForecastResult forecast_autoregressive(const ModelParams& params, const RegionData& region,
                                       std::size_t origin, std::size_t horizon,
                                       const std::vector<bool>& future_status) {
  check_origin(params, region, origin, horizon);
  if (future_status.size() < horizon) {
    throw ValidationError("restriction status missing for forecast day " +
                          std::to_string(future_status.size() + 1) + " of " +
                          std::to_string(horizon) + " in region " + region.series.region);
  }
  const auto& s = region.series;
  const std::size_t L = params.config.window_len;
  Matrix window = window_ending_at(s, region.timeline, origin, L);
  ForecastResult out{s.region, ForecastMode::Autoregressive, {}, {}};
  double cc = s.cc[origin];
  for (std::size_t h = 1; h <= horizon; ++h) {
    const double raw = predict_normalized(params, window, region.demo);
    const double dc = std::max(raw, 0.0);
    cc += dc;
    out.points.push_back(make_point(s.date_at(origin + h), raw, s.population, cc));

    Matrix next(L, kInputChannels);
    for (std::size_t i = 0; i + 1 < L; ++i) {
      auto src = window.row(i + 1);
      std::copy(src.begin(), src.end(), next.row(i).begin());
    }
    route_row(next.row(L - 1), cc, dc, future_status[h - 1]);
    window = std::move(next);
  }
  return out;
}

ForecastResult run_forecast(const ModelParams& params, const RegionData& region,
                            const ForecastRequest& request) {
  if (request.mode == ForecastMode::OneStep) {
    return forecast_one_step(params, region, request.origin, request.horizon);
  }
  if (!request.future_status.empty()) {
    return forecast_autoregressive(params, region, request.origin, request.horizon,
                                   request.future_status);
  }
  if (request.origin >= region.timeline.status.size()) {
    throw UsageError("forecast origin lies outside the restriction timeline");
  }
  const std::vector<bool> persisted(request.horizon, region.timeline.status[request.origin]);
  return forecast_autoregressive(params, region, request.origin, request.horizon, persisted);
}

void BootstrapConfig::validate() const {
  if (replicates < 2) throw UsageError("bootstrap replicates must be at least 2");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("bootstrap level must lie in (0, 1)");
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw UsageError("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // 0-based fractional position of the p-quantile.
  const double pos = std::clamp(n * p - 0.5, 0.0, n - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<std::pair<double, double>> quantile_bands(
    const std::vector<ForecastResult>& members, double level) {
  if (members.size() < 2) throw UsageError("quantile_bands: need at least 2 members");
  const std::size_t days = members.front().points.size();
  const double tail = (1.0 - level) / 2.0;
  std::vector<std::pair<double, double>> bands;
  bands.reserve(days);
  std::vector<double> column(members.size());
  for (std::size_t d = 0; d < days; ++d) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (members[m].points.size() != days) {
        throw UsageError("quantile_bands: members forecast different horizons");
      }
      column[m] = members[m].points[d].dc_pred;
    }
    bands.emplace_back(empirical_quantile(column, tail), empirical_quantile(column, 1.0 - tail));
  }
  return bands;
}

BootstrapEnsemble train_bootstrap_ensemble(const Dataset& dataset,
                                           const ModelConfig& model_config,
                                           const TrainConfig& train_config,
                                           const BootstrapConfig& boot) {
  boot.validate();
  const auto& pool = dataset.split.train;
  if (pool.empty()) throw UsageError("bootstrap: the training set is empty");
  const DemoLookup demos = dataset.demo_lookup();

  // Members are independent; each worker fills its own slots, so the result
  // does not depend on the thread count.
  std::vector<std::optional<ModelParams>> trained(boot.replicates);
  std::vector<std::string> failures(boot.replicates);
  std::vector<std::exception_ptr> errors(boot.replicates);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t b = next++; b < boot.replicates; b = next++) {
      const std::uint64_t child = derive_seed(boot.seed, b);
      Rng rng(child);
      std::vector<WindowSample> resample;
      resample.reserve(pool.size());
      for (std::size_t k = 0; k < pool.size(); ++k) {
        resample.push_back(pool[rng.below(pool.size())]);
      }
      TrainConfig tc = train_config;
      tc.seed = child;
      try {
        trained[b] = train(resample, dataset.split.eval, demos, model_config, tc).params;
      } catch (const TrainingError& e) {
        failures[b] = "member " + std::to_string(b) + ": " + e.what();
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, boot.replicates);
  std::vector<std::thread> pool_threads;
  for (std::size_t k = 1; k < threads; ++k) pool_threads.emplace_back(worker);
  worker();
  for (auto& t : pool_threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  BootstrapEnsemble ensemble;
  for (std::size_t b = 0; b < boot.replicates; ++b) {
    if (trained[b]) {
      ensemble.members.push_back(std::move(*trained[b]));
    } else {
      ensemble.dropped.push_back(failures[b]);
    }
  }
  if (ensemble.members.size() < 2) {
    throw TrainingError("bootstrap: fewer than 2 ensemble members survived training", {});
  }
  return ensemble;
}

ForecastResult forecast_with_bands(const ModelParams& point_model,
                                   const BootstrapEnsemble& ensemble, const RegionData& region,
                                   const ForecastRequest& request, double level) {
  ForecastResult out = run_forecast(point_model, region, request);
  std::vector<ForecastResult> members;
  members.reserve(ensemble.members.size());
  for (const auto& m : ensemble.members) members.push_back(run_forecast(m, region, request));
  const auto bands = quantile_bands(members, level);
  for (std::size_t d = 0; d < out.points.size(); ++d) {
    auto& p = out.points[d];
    p.dc_lower = std::min(bands[d].first, p.dc_pred);
    p.dc_upper = std::max(bands[d].second, p.dc_pred);
  }
  out.dropped_members = ensemble.dropped;
  return out;
}

std::vector<ForecastResult> bootstrap_ci(const Dataset& dataset, const ModelParams& point_model,
                                         const ModelConfig& model_config,
                                         const TrainConfig& train_config,
                                         const BootstrapConfig& boot,
                                         const std::vector<std::string>& regions,
                                         const ForecastRequest& request) {
  const auto ensemble = train_bootstrap_ensemble(dataset, model_config, train_config, boot);
  std::vector<ForecastResult> out;
  for (const auto& region : regions) {
    auto it = dataset.regions.find(region);
    if (it == dataset.regions.end()) throw ValidationError("unknown region '" + region + "'");
    out.push_back(forecast_with_bands(point_model, ensemble, it->second, request, boot.level));
  }
  return out;
}

std::string forecast_csv(const std::vector<ForecastResult>& results) {
  std::ostringstream out;
  out << "region,date,dc_pred,dc_lower,dc_upper,cc_implied,mode\n";
  for (const auto& r : results) {
    for (const auto& p : r.points) {
      out << r.region << ',' << p.date.iso() << ',' << csv::format_double(p.dc_pred) << ','
          << (p.dc_lower ? csv::format_double(*p.dc_lower) : "") << ','
          << (p.dc_upper ? csv::format_double(*p.dc_upper) : "") << ','
          << csv::format_double(p.cc_implied) << ',' << to_string(r.mode) << '\n';
    }
  }
  return out.str();
}

std::string forecast_diagnostics_csv(const std::vector<ForecastResult>& results) {
  std::ostringstream out;
  out << "region,date,dc_raw\n";
  for (const auto& r : results) {
    for (const auto& p : r.points) {
      out << r.region << ',' << p.date.iso() << ',' << csv::format_double(p.dc_raw) << '\n';
    }
  }
  return out.str();
}

}  // namespace epikick
