// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "epikick/data.hpp"
#include "epikick/error.hpp"
#include "epikick/model.hpp"

namespace epikick {

struct TrainConfig {
  double lr0 = 1e-4;
  double plateau_factor = 0.3;
  std::size_t plateau_patience = 20;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 500;
  double min_lr = 1e-7;
  /// Global-norm gradient clipping threshold; 0 disables clipping.
  double clip_norm = 5.0;
  /// Stop when the best eval RMSE has not improved by `early_stop_delta`
  /// for this many epochs.
  std::size_t early_stop_patience = 50;
  double early_stop_delta = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Adam moments and step counter, congruent with the model parameters.
struct AdamState {
  ModelParams m;
  ModelParams v;
  std::size_t t = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState fresh(const ModelConfig& config, double lr);
};

/// sqrt(mean((p - t)^2)). Throws UsageError on empty or unequal inputs.
double rmse(std::span<const double> preds, std::span<const double> targets);

/// One bias-corrected Adam update. Throws NumericError naming the tensor if
/// a gradient is not finite; params and state are untouched in that case.
void adam_step(ModelParams& params, const GradientSet& grads, AdamState& state);

/// Scales `grads` so its global L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
double clip_global_norm(GradientSet& grads, double max_norm);

/// Reduce-on-plateau: after `patience` consecutive epochs without a strict
/// improvement of the best loss, multiply lr by `factor` (floored at
/// `min_lr`) and restart the count.
class PlateauSchedule {
 public:
  PlateauSchedule(double lr, double factor, std::size_t patience, double min_lr);

  /// Feeds one epoch loss and returns the learning rate for the next epoch.
  double observe(double loss);
  double lr() const { return lr_; }
  double best() const { return best_; }
  std::size_t bad_epochs() const { return bad_epochs_; }

 private:
  double lr_;
  double factor_;
  std::size_t patience_;
  double min_lr_;
  double best_;
  std::size_t bad_epochs_ = 0;
};

/// Learning rate after replaying a whole loss history from `lr0`.
double plateau_schedule(std::span<const double> losses, double lr0, const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_rmse = 0.0;
  double eval_rmse = 0.0;  // NaN when there is no eval set
  double lr = 0.0;         // rate used during this epoch
  double seconds = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

/// Raised when an epoch loss is not finite. Carries the history so far.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, TrainHistory history)
      : Error(what), history_(std::move(history)) {}
  const TrainHistory& history() const { return history_; }

 private:
  TrainHistory history_;
};

struct TrainResult {
  ModelParams params;  // best selection-metric epoch
  TrainHistory history;
  std::size_t best_epoch = 0;
  double best_metric = 0.0;
};

using DemoLookup = std::map<std::string, std::vector<double>>;

/// RMSE of the model over a sample list (normalized units).
double evaluate_rmse(const ModelParams& params, const std::vector<WindowSample>& samples,
                     const DemoLookup& demos);

/// Mini-batch training with the squared-error surrogate of RMSE, Adam,
/// gradient clipping and the plateau schedule. Model selection uses eval
/// RMSE, or train RMSE when the eval set is empty. Training starts from
/// `init` when given, otherwise from init_params seeded by config.seed.
TrainResult train(const std::vector<WindowSample>& train_set,
                  const std::vector<WindowSample>& eval_set, const DemoLookup& demos,
                  const ModelConfig& model_config, const TrainConfig& config,
                  const ModelParams* init = nullptr);

/// `epoch,train_rmse,eval_rmse,lr` rows.
std::string history_csv(const TrainHistory& history);

}  // namespace epikick
