// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "epikick/csv.hpp"

namespace epikick {

void TrainConfig::validate() const {
  if (!(lr0 >= 0.0) || !std::isfinite(lr0)) throw UsageError("lr0 must be a finite value >= 0");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) {
    throw UsageError("plateau_factor must lie in (0, 1)");
  }
  if (plateau_patience < 1) throw UsageError("plateau_patience must be at least 1");
  if (batch_size < 1) throw UsageError("batch_size must be at least 1");
  if (max_epochs < 1) throw UsageError("max_epochs must be at least 1");
  if (!(min_lr >= 0.0)) throw UsageError("min_lr must be >= 0");
  if (!(clip_norm >= 0.0)) throw UsageError("clip_norm must be >= 0");
  if (early_stop_patience < 1) throw UsageError("early_stop_patience must be at least 1");
}

AdamState AdamState::fresh(const ModelConfig& config, double lr) {
  AdamState s;
  s.m = ModelParams::zeros(config);
  s.v = ModelParams::zeros(config);
  s.lr = lr;
  return s;
}

double rmse(std::span<const double> preds, std::span<const double> targets) {
  if (preds.empty() || preds.size() != targets.size()) {
    throw UsageError("rmse: need equal, nonzero lengths (got " + std::to_string(preds.size()) +
                     " and " + std::to_string(targets.size()) + ")");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i] - targets[i];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(preds.size()));
}

void adam_step(ModelParams& params, const GradientSet& grads, AdamState& state) {
  for_each_tensor_pair(params, grads.tensors, [](const std::string& name, const Matrix& p,
                                                  const Matrix& g) {
    if (!p.same_shape(g)) throw ShapeError("adam_step: gradient shape mismatch for " + name);
    for (double v : g.values()) {
      if (!std::isfinite(v)) throw NumericError("adam_step: non-finite gradient in " + name);
    }
  });

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  std::vector<Matrix*> ms;
  std::vector<Matrix*> vs;
  for_each_tensor(state.m, [&](const std::string&, Matrix& m) { ms.push_back(&m); });
  for_each_tensor(state.v, [&](const std::string&, Matrix& v) { vs.push_back(&v); });
  std::size_t k = 0;
  for_each_tensor_pair(params, grads.tensors, [&](const std::string&, Matrix& p,
                                                   const Matrix& g) {
    auto theta = p.values();
    auto grad = g.values();
    auto m = ms[k]->values();
    auto v = vs[k]->values();
    ++k;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grad[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  });
}

double clip_global_norm(GradientSet& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

PlateauSchedule::PlateauSchedule(double lr, double factor, std::size_t patience, double min_lr)
    : lr_(lr),
      factor_(factor),
      patience_(patience),
      min_lr_(min_lr),
      best_(std::numeric_limits<double>::infinity()) {}

double PlateauSchedule::observe(double loss) {
  if (loss < best_) {
    best_ = loss;
    bad_epochs_ = 0;
    return lr_;
  }
  if (++bad_epochs_ >= patience_) {
    lr_ = std::max(lr_ * factor_, min_lr_);
    bad_epochs_ = 0;
  }
  return lr_;
}

double plateau_schedule(std::span<const double> losses, double lr0, const TrainConfig& config) {
  PlateauSchedule schedule(lr0, config.plateau_factor, config.plateau_patience, config.min_lr);
  for (double loss : losses) schedule.observe(loss);
  return schedule.lr();
}

double evaluate_rmse(const ModelParams& params, const std::vector<WindowSample>& samples,
                     const DemoLookup& demos) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> preds;
  std::vector<double> targets;
  preds.reserve(samples.size());
  targets.reserve(samples.size());
  for (const auto& s : samples) {
    preds.push_back(predict(s.inputs, demos.at(s.region), params));
    targets.push_back(s.target);
  }
  return rmse(preds, targets);
}

TrainResult train(const std::vector<WindowSample>& train_set,
                  const std::vector<WindowSample>& eval_set, const DemoLookup& demos,
                  const ModelConfig& model_config, const TrainConfig& config,
                  const ModelParams* init) {
  config.validate();
  model_config.validate();
  if (train_set.empty()) throw UsageError("train: the training set is empty");
  for (const auto* set : {&train_set, &eval_set}) {
    for (const auto& s : *set) {
      if (!demos.contains(s.region)) {
        throw ValidationError("train: no demographics for region " + s.region);
      }
    }
  }

  Rng rng(config.seed);
  ModelParams params = init ? *init : init_params(model_config, rng);
  if (params.config != model_config) throw UsageError("train: initial params use another config");

  AdamState adam = AdamState::fresh(model_config, config.lr0);
  PlateauSchedule schedule(config.lr0, config.plateau_factor, config.plateau_patience,
                           config.min_lr);
  GradientSet grads = GradientSet::zeros(model_config);
  ForwardCache cache;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{params, {}, 0, std::numeric_limits<double>::infinity()};
  double best_for_patience = std::numeric_limits<double>::infinity();
  std::size_t stale_epochs = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    rng.shuffle(std::span(order));

    double sse = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double n = static_cast<double>(end - begin);
      grads.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const WindowSample& s = train_set[order[k]];
        const double pred = forward(s.inputs, demos.at(s.region), params, cache);
        const double err = pred - s.target;
        sse += err * err;
        backward(params, cache, 2.0 * err / n, grads);
      }
      clip_global_norm(grads, config.clip_norm);
      try {
        adam_step(params, grads, adam);
      } catch (const NumericError& e) {
        throw TrainingError(std::string("training diverged in epoch ") + std::to_string(epoch) +
                                ": " + e.what(),
                            result.history);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_rmse = std::sqrt(sse / static_cast<double>(order.size()));
    rec.eval_rmse = evaluate_rmse(params, eval_set, demos);
    rec.lr = adam.lr;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.push_back(rec);

    if (!std::isfinite(rec.train_rmse) || (!eval_set.empty() && !std::isfinite(rec.eval_rmse))) {
      throw TrainingError("training diverged: epoch " + std::to_string(epoch) +
                              " loss is not finite",
                          result.history);
    }

    const double metric = eval_set.empty() ? rec.train_rmse : rec.eval_rmse;
    if (metric < result.best_metric) {
      result.best_metric = metric;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (metric < best_for_patience - config.early_stop_delta) {
      best_for_patience = metric;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
    }

    adam.lr = schedule.observe(rec.train_rmse);
    if (stale_epochs >= config.early_stop_patience || adam.lr <= config.min_lr) break;
  }
  return result;
}

std::string history_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,train_rmse,eval_rmse,lr\n";
  for (const auto& rec : history) {
    out << rec.epoch << ',' << csv::format_double(rec.train_rmse) << ','
        << csv::format_double(rec.eval_rmse) << ',' << csv::format_double(rec.lr) << '\n';
  }
  return out.str();
}

}  // namespace epikick
