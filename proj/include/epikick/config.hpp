// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epikick/forecast.hpp"
#include "epikick/model.hpp"
#include "epikick/synth.hpp"
#include "epikick/train.hpp"

namespace epikick {

/// Every knob of a pipeline run. Serialized as flat `key = value` lines;
/// see RunConfig::keys() for the full list.
struct RunConfig {
  // Inputs and outputs.
  std::string cases;
  std::string restrictions;
  std::string demographics;
  std::string checkpoint;
  std::string scenario;
  std::string out;

  // Dataset.
  std::vector<std::string> test_regions{"AZ", "MI", "NJ", "SC"};
  double eval_fraction = 0.2;

  ModelConfig model;
  TrainConfig train;

  // Forecast.
  std::string region;  // empty: every test region
  std::size_t horizon = 14;
  std::string mode = "onestep";
  std::string origin;  // ISO date of the last observed day; empty: T - 1 - horizon
  bool bootstrap = false;
  BootstrapConfig boot;

  SynthConfig sim;

  std::uint64_t seed = 0;

  /// Sets one key from text. Throws UsageError for unknown keys or values
  /// that do not parse.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  /// All keys in documentation order.
  static const std::vector<std::string>& keys();
  static bool has_key(const std::string& key);

  /// `key = value` lines for every key, in keys() order.
  std::string to_text() const;

  /// Seeds handed to each stage, derived from `seed`.
  std::uint64_t split_seed() const;
  std::uint64_t train_seed() const;
  std::uint64_t bootstrap_seed() const;
};

/// Applies `key = value` lines ('#' starts a comment) onto `config`.
void apply_config_text(const std::string& text, RunConfig& config);
RunConfig load_run_config(const std::string& path);

}  // namespace epikick
