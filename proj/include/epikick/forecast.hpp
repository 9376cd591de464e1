// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epikick/data.hpp"
#include "epikick/model.hpp"
#include "epikick/train.hpp"

namespace epikick {

enum class ForecastMode { OneStep, Autoregressive };

std::string to_string(ForecastMode mode);
ForecastMode parse_forecast_mode(std::string_view text);

struct ForecastPoint {
  Date date;
  double dc_pred = 0.0;  // counts, clamped at zero
  double dc_raw = 0.0;   // counts, before clamping
  std::optional<double> dc_lower;
  std::optional<double> dc_upper;
  double cc_implied = 0.0;
};

struct ForecastResult {
  std::string region;
  ForecastMode mode = ForecastMode::OneStep;
  std::vector<ForecastPoint> points;
  /// Ensemble members dropped because their training diverged.
  std::vector<std::string> dropped_members;
};

/// Raw model output for one window, in normalized (per-capita) units.
double predict_normalized(const ModelParams& params, const Matrix& window,
                          std::span<const double> demo);

/// Next-day new cases in counts: the model output times `population`,
/// clamped at zero. Throws ValidationError if `demo` does not match the
/// checkpoint's demographic dimension.
double predict_one_step(const ModelParams& params, const Matrix& window,
                        std::span<const double> demo, double population);

/// What to forecast for one region. The forecast covers days
/// origin + 1 .. origin + horizon, where `origin` indexes the region series.
struct ForecastRequest {
  ForecastMode mode = ForecastMode::OneStep;
  std::size_t origin = 0;
  std::size_t horizon = 1;
  /// Autoregressive only: restriction status per forecast day. Empty means
  /// "persist the status observed on the origin day".
  std::vector<bool> future_status;
};

/// One-step predictions for each forecast day from windows of observed
/// history. cc_implied accumulates clamped predictions from the observed
/// cc on the origin day.
ForecastResult forecast_one_step(const ModelParams& params, const RegionData& region,
                                 std::size_t origin, std::size_t horizon);

/// Feeds each prediction back as the next input row: dc from the model,
/// cc_{t+1} = cc_t + max(dc_{t+1}, 0), the row routed by `future_status`.
ForecastResult forecast_autoregressive(const ModelParams& params, const RegionData& region,
                                       std::size_t origin, std::size_t horizon,
                                       const std::vector<bool>& future_status);

ForecastResult run_forecast(const ModelParams& params, const RegionData& region,
                            const ForecastRequest& request);

struct BootstrapConfig {
  std::size_t replicates = 30;
  double level = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Empirical quantile with linear interpolation between order statistics
/// placed at (k - 0.5) / n. Values outside that range clamp to the extremes,
/// so two samples give min and max for any level >= 0.5.
double empirical_quantile(std::vector<double> values, double p);

/// Per-date (lower, upper) bands from member forecasts at `level`.
std::vector<std::pair<double, double>> quantile_bands(
    const std::vector<ForecastResult>& members, double level);

/// A bootstrap ensemble: every member is trained on a with-replacement
/// resample of the training samples (same size) using a child seed.
struct BootstrapEnsemble {
  std::vector<ModelParams> members;
  std::vector<std::string> dropped;
};

BootstrapEnsemble train_bootstrap_ensemble(const Dataset& dataset,
                                           const ModelConfig& model_config,
                                           const TrainConfig& train_config,
                                           const BootstrapConfig& boot);

/// Forecast from `point_model` with per-date bands from the ensemble. Bands
/// are widened to contain the point prediction.
ForecastResult forecast_with_bands(const ModelParams& point_model,
                                   const BootstrapEnsemble& ensemble, const RegionData& region,
                                   const ForecastRequest& request, double level);

/// Trains the ensemble and returns banded forecasts for each requested region.
std::vector<ForecastResult> bootstrap_ci(const Dataset& dataset, const ModelParams& point_model,
                                         const ModelConfig& model_config,
                                         const TrainConfig& train_config,
                                         const BootstrapConfig& boot,
                                         const std::vector<std::string>& regions,
                                         const ForecastRequest& request);

/// `region,date,dc_pred,dc_lower,dc_upper,cc_implied,mode`; absent bounds
/// are empty cells.
std::string forecast_csv(const std::vector<ForecastResult>& results);
/// `region,date,dc_raw`: unclamped predictions.
std::string forecast_diagnostics_csv(const std::vector<ForecastResult>& results);

}  // namespace epikick
