// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

// epikick command-line driver.

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "epikick/config.hpp"
#include "epikick/error.hpp"
#include "epikick/pipeline.hpp"

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

std::string flag_for(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

const std::vector<std::string> kInputKeys = {"cases", "restrictions", "demographics",
                                             "test_regions"};
const std::vector<std::string> kModelKeys = {"eval_fraction", "window_len", "hidden_dim",
                                             "num_layers"};
const std::vector<std::string> kTrainKeys = {
    "lr0",        "plateau_factor", "plateau_patience",    "batch_size",
    "max_epochs", "min_lr",         "clip_norm",           "early_stop_patience",
    "early_stop_delta"};

void add_key(CLI::App* cmd, Overrides& overrides, const std::string& key,
             const std::string& flag) {
  cmd->add_option_function<std::string>(
      flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
      "config key " + key);
}

void add_keys(CLI::App* cmd, Overrides& overrides, const std::vector<std::string>& keys) {
  for (const auto& key : keys) add_key(cmd, overrides, key, flag_for(key));
}

int fail(const std::string& message, int code) {
  std::cerr << "epikick: error: " << message << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demographic-conditioned GRU epidemic forecaster"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string seed_text;
  std::string out_dir;
  Overrides overrides;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed_text, "master seed");
  app.add_option("--out", out_dir, "output directory (default runs/<timestamp>-seed<N>)");
  app.add_option_function<std::vector<std::string>>(
      "--set",
      [&overrides](const std::vector<std::string>& items) {
        for (const auto& item : items) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value");
          overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
      },
      "override any config key (key=value)");

  auto* simulate = app.add_subcommand("simulate", "write a synthetic SIR fixture");
  for (const auto& key : epikick::RunConfig::keys()) {
    if (key.rfind("sim_", 0) == 0) add_key(simulate, overrides, key, flag_for(key.substr(4)));
  }
  simulate->add_option_function<std::string>(
      "--beta",
      [&overrides](const std::string& v) {
        overrides.emplace_back("sim_beta_min", v);
        overrides.emplace_back("sim_beta_max", v);
      },
      "fixed transmission rate for every region");
  simulate->add_option_function<std::string>(
      "--gamma",
      [&overrides](const std::string& v) {
        overrides.emplace_back("sim_gamma_min", v);
        overrides.emplace_back("sim_gamma_max", v);
      },
      "fixed removal rate for every region");

  auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
  add_keys(train, overrides, kInputKeys);
  add_keys(train, overrides, kModelKeys);
  add_keys(train, overrides, kTrainKeys);

  auto* evaluate = app.add_subcommand("evaluate", "one-step RMSE on the test regions");
  add_keys(evaluate, overrides, {"checkpoint"});
  add_keys(evaluate, overrides, kInputKeys);

  auto* forecast = app.add_subcommand("forecast", "one-step or autoregressive forecasts");
  add_keys(forecast, overrides, {"checkpoint", "region", "horizon", "mode", "origin", "scenario",
                                 "bootstrap_replicates", "bootstrap_level"});
  add_keys(forecast, overrides, kInputKeys);
  add_keys(forecast, overrides, kModelKeys);
  add_keys(forecast, overrides, kTrainKeys);
  forecast->add_flag_callback(
      "--bootstrap", [&overrides] { overrides.emplace_back("bootstrap", "true"); },
      "add bootstrap confidence bands");
  forecast->add_flag_callback(
      "--no-bootstrap", [&overrides] { overrides.emplace_back("bootstrap", "false"); },
      "point forecasts only");

  auto* relevance = app.add_subcommand("relevance", "embedding-norm feature relevance");
  add_keys(relevance, overrides, {"checkpoint"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    epikick::RunConfig config;
    if (!config_path.empty()) config = epikick::load_run_config(config_path);
    for (const auto& [key, value] : overrides) config.set(key, value);
    if (!seed_text.empty()) config.set("seed", seed_text);
    if (!out_dir.empty()) config.set("out", out_dir);

    const auto dir = epikick::resolve_run_dir(config);
    if (simulate->parsed()) epikick::cmd_simulate(config, dir);
    if (train->parsed()) epikick::cmd_train(config, dir);
    if (evaluate->parsed()) epikick::cmd_evaluate(config, dir);
    if (forecast->parsed()) epikick::cmd_forecast(config, dir);
    if (relevance->parsed()) epikick::cmd_relevance(config, dir);
    std::cout << dir.string() << "\n";
  } catch (const epikick::UsageError& e) {
    return fail(e.what(), 2);
  } catch (const std::exception& e) {
    return fail(e.what(), 1);
  }
  return 0;
}
